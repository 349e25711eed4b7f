#pragma once

// JSON files for instances, dilations and reports.
//
// A matrix is {"rows": r, "cols": c, "data": [[re, im], ...]} with entries in
// row-major order. Doubles are written in shortest round-trip form, so
// parse(emit(x)) reproduces x bit for bit. See docs/file-formats.md.

#include <fstream>
#include <sstream>
#include <string>
#include <vector>

#include "json.hpp"

#include "cp_map.hpp"
#include "dilation.hpp"
#include "equivalence.hpp"
#include "errors.hpp"
#include "linalg.hpp"

namespace stinespring::io {

using json = nlohmann::json;

inline constexpr int kFormatVersion = 1;
inline constexpr const char* kInstanceFormat = "stinespring-instance";
inline constexpr const char* kDilationFormat = "stinespring-dilation";
inline constexpr const char* kReportFormat = "stinespring-report";
inline constexpr const char* kWitnessFormat = "stinespring-equivalence";

inline json matrix_to_json(const CMatrix& m) {
    json data = json::array();
    for (Eigen::Index r = 0; r < m.rows(); ++r)
        for (Eigen::Index c = 0; c < m.cols(); ++c) data.push_back({m(r, c).real(), m(r, c).imag()});
    return {{"rows", m.rows()}, {"cols", m.cols()}, {"data", std::move(data)}};
}

inline CMatrix matrix_from_json(const json& j) {
    const auto rows = j.at("rows").get<Eigen::Index>();
    const auto cols = j.at("cols").get<Eigen::Index>();
    const auto& data = j.at("data");
    if (rows < 0 || cols < 0 || !data.is_array() || data.size() != static_cast<std::size_t>(rows * cols))
        fail(ErrorKind::ParseError, "matrix data does not match its " + std::to_string(rows) + "x" +
                                        std::to_string(cols) + " shape");
    CMatrix m(rows, cols);
    std::size_t k = 0;
    for (Eigen::Index r = 0; r < rows; ++r)
        for (Eigen::Index c = 0; c < cols; ++c, ++k) {
            const auto& z = data[k];
            if (!z.is_array() || z.size() != 2) fail(ErrorKind::ParseError, "complex entry must be [re, im]");
            m(r, c) = cplx(z[0].get<double>(), z[1].get<double>());
        }
    if (!all_finite(m)) fail(ErrorKind::ParseError, "non-finite matrix entry");
    return m;
}

inline json matrices_to_json(const std::vector<CMatrix>& ms) {
    json out = json::array();
    for (const auto& m : ms) out.push_back(matrix_to_json(m));
    return out;
}

inline std::vector<CMatrix> matrices_from_json(const json& j) {
    if (!j.is_array()) fail(ErrorKind::ParseError, "expected an array of matrices");
    std::vector<CMatrix> out;
    for (const auto& m : j) out.push_back(matrix_from_json(m));
    return out;
}

namespace detail {

inline void expect_format(const json& j, const char* format) {
    if (!j.is_object() || j.value("format", std::string()) != format)
        fail(ErrorKind::ParseError, std::string("not a ") + format + " file");
    if (j.at("version").get<int>() != kFormatVersion)
        fail(ErrorKind::ParseError, "unsupported version " + j.at("version").dump());
}

/// Run `body`, turning JSON access errors and shape failures into ParseError.
template <class F>
auto parsing(F&& body) {
    try {
        return body();
    } catch (const json::exception& e) {
        fail(ErrorKind::ParseError, e.what());
    } catch (const Error& e) {
        switch (e.kind()) {
        case ErrorKind::ShapeMismatch:
        case ErrorKind::DescriptorMismatch:
        case ErrorKind::DimensionTooSmall:
            fail(ErrorKind::ParseError, e.what());
        default:
            throw;
        }
    }
}

} // namespace detail

inline json instance_to_json(const Instance& inst) {
    json j = {{"format", kInstanceFormat},
              {"version", kFormatVersion},
              {"algebra", {{"block_dims", inst.algebra().block_dims()}}},
              {"module", {{"mults", inst.module().mults()}}},
              {"n", inst.n()},
              {"h1", inst.h1()},
              {"h2", inst.h2()},
              {"phi", matrices_to_json(inst.cp.action())},
              {"Phi", matrices_to_json(inst.tuple.action())}};
    json prov = json::object();
    if (inst.provenance.seed) prov["seed"] = *inst.provenance.seed;
    if (!inst.provenance.meta.empty()) prov["meta"] = inst.provenance.meta;
    if (!prov.empty()) j["provenance"] = std::move(prov);
    return j;
}

inline Instance instance_from_json(const json& j) {
    return detail::parsing([&] {
        detail::expect_format(j, kInstanceFormat);
        const AlgebraDescriptor alg(j.at("algebra").at("block_dims").get<std::vector<std::size_t>>());
        const ModuleDescriptor mod(alg, j.at("module").at("mults").get<std::vector<std::size_t>>());
        const auto n = j.at("n").get<std::size_t>();
        const auto h1 = j.at("h1").get<std::size_t>();
        const auto h2 = j.at("h2").get<std::size_t>();
        Provenance prov;
        if (j.contains("provenance")) {
            const auto& p = j.at("provenance");
            if (p.contains("seed")) prov.seed = p.at("seed").get<std::uint64_t>();
            if (p.contains("meta")) prov.meta = p.at("meta").get<std::map<std::string, std::string>>();
        }
        return Instance(CPBlockMap(n, alg, h1, matrices_from_json(j.at("phi"))),
                        ModuleCPTuple(n, mod, h1, h2, matrices_from_json(j.at("Phi"))), std::move(prov));
    });
}

inline json dilation_to_json(const DilationData& d) {
    std::vector<std::size_t> k2i;
    for (std::size_t i = 0; i < d.W.size(); ++i) k2i.push_back(d.k2i_dim(i));
    return {{"format", kDilationFormat},
            {"version", kFormatVersion},
            {"n", d.n},
            {"h1", d.h1},
            {"h2", d.h2},
            {"dim_a", d.dim_a},
            {"dim_v", d.dim_v},
            {"r1", d.r1},
            {"r2", d.r2},
            {"pi", matrices_to_json(d.pi)},
            {"S", matrices_to_json(d.S)},
            {"psi", matrices_to_json(d.psi)},
            {"k2_embed", matrix_to_json(d.k2_embed)},
            {"W", matrices_to_json(d.W)},
            {"k2i_dims", k2i},
            {"diagnostics", {{"pi_welldef", d.pi_welldef}, {"psi_welldef", d.psi_welldef}}}};
}

inline DilationData dilation_from_json(const json& j) {
    return detail::parsing([&] {
        detail::expect_format(j, kDilationFormat);
        DilationData d;
        d.n = j.at("n").get<std::size_t>();
        d.h1 = j.at("h1").get<std::size_t>();
        d.h2 = j.at("h2").get<std::size_t>();
        d.dim_a = j.at("dim_a").get<std::size_t>();
        d.dim_v = j.at("dim_v").get<std::size_t>();
        d.r1 = j.at("r1").get<std::size_t>();
        d.r2 = j.at("r2").get<std::size_t>();
        d.pi = matrices_from_json(j.at("pi"));
        d.S = matrices_from_json(j.at("S"));
        d.psi = matrices_from_json(j.at("psi"));
        d.k2_embed = matrix_from_json(j.at("k2_embed"));
        d.W = matrices_from_json(j.at("W"));
        if (j.contains("diagnostics")) {
            d.pi_welldef = j.at("diagnostics").value("pi_welldef", 0.0);
            d.psi_welldef = j.at("diagnostics").value("psi_welldef", 0.0);
        }
        if (j.contains("k2i_dims")) {
            const auto dims = j.at("k2i_dims").get<std::vector<std::size_t>>();
            if (dims.size() != d.W.size()) fail(ErrorKind::ParseError, "k2i_dims length differs from W");
            for (std::size_t i = 0; i < dims.size(); ++i)
                if (dims[i] != d.k2i_dim(i)) fail(ErrorKind::ParseError, "k2i_dims disagrees with W");
        }
        return d;
    });
}

inline json report_to_json(const VerificationReport& rep, const DilationData& d) {
    json residuals = json::object();
    for (const auto& [name, value] : rep.gated()) residuals[name] = value;
    return {{"format", kReportFormat},
            {"version", kFormatVersion},
            {"pass", rep.pass},
            {"tol", rep.tol},
            {"r1", d.r1},
            {"r2", d.r2},
            {"residuals", std::move(residuals)},
            {"s_isometry_defect", rep.s_isometry_defect},
            {"all_unital", rep.all_unital}};
}

inline json witness_to_json(const EquivalenceWitness& w, bool pass, double tol) {
    json residuals = json::object();
    for (const auto& [name, value] : w.diagram()) residuals[name] = value;
    residuals["u1_solve"] = w.u1_solve;
    residuals["u2_solve"] = w.u2_solve;
    return {{"format", kWitnessFormat}, {"version", kFormatVersion}, {"pass", pass}, {"tol", tol},
            {"residuals", std::move(residuals)}, {"U1", matrix_to_json(w.U1)}, {"U2", matrix_to_json(w.U2)}};
}

inline std::string dump(const json& j) { return j.dump(1) + "\n"; }

inline json read_json_file(const std::string& path) {
    std::ifstream in(path);
    if (!in) fail(ErrorKind::IoError, "cannot open " + path);
    try {
        return json::parse(in);
    } catch (const json::exception& e) {
        fail(ErrorKind::ParseError, path + ": " + e.what());
    }
}

inline void write_text_file(const std::string& path, const std::string& text) {
    std::ofstream out(path, std::ios::binary | std::ios::trunc);
    if (!out) fail(ErrorKind::IoError, "cannot write " + path);
    out << text;
    if (!out) fail(ErrorKind::IoError, "write failed for " + path);
}

inline Instance read_instance(const std::string& path) { return instance_from_json(read_json_file(path)); }
inline DilationData read_dilation(const std::string& path) { return dilation_from_json(read_json_file(path)); }

inline void write_instance(const std::string& path, const Instance& inst) {
    write_text_file(path, dump(instance_to_json(inst)));
}
inline void write_dilation(const std::string& path, const DilationData& d) {
    write_text_file(path, dump(dilation_to_json(d)));
}

} // namespace stinespring::io
