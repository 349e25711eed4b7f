#pragma once

// Subcommand implementations behind the `stinespring` executable. Each returns
// the process exit code; output goes to the streams passed in.
//
// Exit codes:
//   0  success / report passes
//   1  report computed but some residual exceeds the tolerance
//   2  parse, I/O, shape or usage error
//   3  invalid input map (NotPSD, Hermiticity, compatibility)
//   4  well-definedness failure
//   5  minimality or equivalence failure

#include <cstdint>
#include <cstdlib>
#include <ctime>
#include <iomanip>
#include <ostream>
#include <string>
#include <vector>

#include "dilation.hpp"
#include "equivalence.hpp"
#include "errors.hpp"
#include "fuzz.hpp"
#include "io.hpp"
#include "random_instance.hpp"

namespace stinespring::cli {

enum ExitCode : int {
    kPass = 0,
    kFailedCheck = 1,
    kParse = 2,
    kValidity = 3,
    kWellDefinedness = 4,
    kEquivalence = 5,
};

inline int exit_code_for(ErrorKind kind) {
    switch (kind) {
    case ErrorKind::NotPSD:
    case ErrorKind::NotHermitian:
    case ErrorKind::HermiticityViolation:
    case ErrorKind::NotCompatible:
        return kValidity;
    case ErrorKind::WellDefinednessFailure:
        return kWellDefinedness;
    case ErrorKind::NotMinimal:
    case ErrorKind::InconsistentSpans:
        return kEquivalence;
    default:
        return kParse;
    }
}

/// Default tolerance, overridable through STINESPRING_TOL.
inline double default_tol() {
    if (const char* env = std::getenv("STINESPRING_TOL")) {
        char* end = nullptr;
        const double v = std::strtod(env, &end);
        if (end != env && v > 0.0) return v;
    }
    return kDefaultTol;
}

struct GenerateArgs {
    InstanceSpec spec;
    std::string out_path;
};

struct DilateArgs {
    std::string instance_path;
    std::string out_path;
    double cutoff = kDefaultCutoff;
    double tol = default_tol();
    std::optional<std::uint64_t> basis_seed;
    std::string report_path; // optional JSON report
    bool json = false;       // print the JSON report instead of the table
};

struct VerifyArgs {
    std::string instance_path;
    std::string dilation_path;
    double tol = default_tol();
    std::string report_path;
    bool json = false;
};

struct EquivArgs {
    std::string instance_path;
    std::string dilation_a;
    std::string dilation_b;
    double tol = default_tol();
    std::string report_path;
    bool json = false;
};

struct RotateArgs {
    std::string dilation_path;
    std::string out_path;
    std::uint64_t seed = 1;
};

struct FuzzArgs {
    FuzzOptions options;
    std::string report_path;
    bool json = false;
};

namespace detail {

inline std::string fmt(double v) {
    std::ostringstream s;
    s << std::scientific << std::setprecision(3) << v;
    return s.str();
}

inline void print_row(std::ostream& out, const std::string& name, double value, double tol) {
    out << "  " << std::left << std::setw(26) << name << std::right << std::setw(11) << fmt(value)
        << (value <= tol ? "  ok" : "  FAIL") << "\n";
}

inline void print_report(std::ostream& out, const VerificationReport& rep, const DilationData& d) {
    out << "dim K1 = " << d.r1 << ", dim K2 = " << d.r2 << ", dim K2i = [";
    for (std::size_t i = 0; i < d.n; ++i) out << (i ? ", " : "") << d.k2i_dim(i);
    out << "]\n";
    for (const auto& [name, value] : rep.gated()) print_row(out, name, value, rep.tol);
    for (std::size_t i = 0; i < rep.s_isometry_defect.size(); ++i)
        out << "  s_isometry_defect[" << i << "]" << std::string(i < 10 ? 5 : 4, ' ') << std::right
            << std::setw(11) << fmt(rep.s_isometry_defect[i])
            << (rep.all_unital ? "" : "  (reported only: some phi_ii is not unital)") << "\n";
    out << (rep.pass ? "PASS" : "FAIL") << " at tol " << fmt(rep.tol) << "\n";
}

template <class F>
int guarded(std::ostream& err, F&& body) {
    try {
        return body();
    } catch (const Error& e) {
        err << "error: " << e.what() << "\n";
        return exit_code_for(e.kind());
    }
}

inline void emit_report(const io::json& j, const std::string& path, bool json_to_out, std::ostream& out) {
    if (!path.empty()) io::write_text_file(path, io::dump(j));
    if (json_to_out) out << io::dump(j);
}

} // namespace detail

inline int cmd_generate(const GenerateArgs& args, std::ostream& out, std::ostream& err) {
    return detail::guarded(err, [&] {
        const auto inst = random_instance(args.spec);
        if (!is_completely_n_positive(inst.cp, kDefaultTol) || verify_compatibility(inst) > kDefaultTol)
            fail(ErrorKind::NotCompatible, "generated instance failed its validity gates");
        const std::string text = io::dump(io::instance_to_json(inst));
        if (args.out_path.empty() || args.out_path == "-")
            out << text;
        else
            io::write_text_file(args.out_path, text);
        return static_cast<int>(kPass);
    });
}

inline int cmd_dilate(const DilateArgs& args, std::ostream& out, std::ostream& err) {
    return detail::guarded(err, [&] {
        const auto inst = io::read_instance(args.instance_path);
        DilateOptions opts;
        opts.cutoff = args.cutoff;
        opts.tol = args.tol;
        opts.basis_seed = args.basis_seed;
        const auto data = dilate(inst, opts);
        if (!args.out_path.empty()) io::write_dilation(args.out_path, data);
        const auto rep = verify_dilation(inst, data, args.tol, span_cutoff(args.cutoff));
        if (!args.json) detail::print_report(out, rep, data);
        detail::emit_report(io::report_to_json(rep, data), args.report_path, args.json, out);
        return static_cast<int>(rep.pass ? kPass : kFailedCheck);
    });
}

inline int cmd_verify(const VerifyArgs& args, std::ostream& out, std::ostream& err) {
    return detail::guarded(err, [&] {
        const auto inst = io::read_instance(args.instance_path);
        const auto data = io::read_dilation(args.dilation_path);
        const auto rep = verify_dilation(inst, data, args.tol);
        if (!args.json) detail::print_report(out, rep, data);
        detail::emit_report(io::report_to_json(rep, data), args.report_path, args.json, out);
        return static_cast<int>(rep.pass ? kPass : kFailedCheck);
    });
}

inline int cmd_equiv(const EquivArgs& args, std::ostream& out, std::ostream& err) {
    return detail::guarded(err, [&] {
        const auto inst = io::read_instance(args.instance_path);
        const auto a = io::read_dilation(args.dilation_a);
        const auto b = io::read_dilation(args.dilation_b);
        auto w = build_unitaries(inst, a, b, args.tol);
        const bool ok = verify_diagram(w, inst, a, b, args.tol);
        if (!args.json) {
            out << "U1: " << w.U1.rows() << "x" << w.U1.cols() << ", U2: " << w.U2.rows() << "x"
                << w.U2.cols() << "\n";
            for (const auto& [name, value] : w.diagram()) detail::print_row(out, name, value, args.tol);
            detail::print_row(out, "u1_solve", w.u1_solve, args.tol);
            detail::print_row(out, "u2_solve", w.u2_solve, args.tol);
            out << (ok ? "PASS" : "FAIL") << " at tol " << detail::fmt(args.tol) << "\n";
        }
        detail::emit_report(io::witness_to_json(w, ok, args.tol), args.report_path, args.json, out);
        return static_cast<int>(ok ? kPass : kEquivalence);
    });
}

/// Writes a copy of a dilation transported by seeded Haar unitaries on K1 and K2.
inline int cmd_rotate(const RotateArgs& args, std::ostream& out, std::ostream& err) {
    return detail::guarded(err, [&] {
        const auto d = io::read_dilation(args.dilation_path);
        Rng rng(args.seed);
        const CMatrix q1 = haar_unitary(rng, static_cast<Eigen::Index>(d.r1));
        const CMatrix q2 = haar_unitary(rng, static_cast<Eigen::Index>(d.r2));
        const std::string text = io::dump(io::dilation_to_json(rotate_dilation(d, q1, q2)));
        if (args.out_path.empty() || args.out_path == "-")
            out << text;
        else
            io::write_text_file(args.out_path, text);
        return static_cast<int>(kPass);
    });
}

inline io::json fuzz_report_to_json(const FuzzReport& rep) {
    const auto& o = rep.options;
    io::json trials = io::json::array();
    for (const auto& t : rep.trials) {
        trials.push_back({{"index", t.index},
                          {"seed", t.seed},
                          {"n", t.spec.n},
                          {"block_dims", t.spec.block_dims},
                          {"mults", t.spec.mults},
                          {"h1", t.spec.h1},
                          {"h2", t.spec.h2},
                          {"unital", t.spec.unital},
                          {"r1", t.r1},
                          {"r2", t.r2},
                          {"pass", t.pass},
                          {"failure", t.failure}});
    }
    io::json hist = io::json::array();
    for (const auto& [dims, count] : rep.histogram)
        hist.push_back({{"r1", dims.first}, {"r2", dims.second}, {"count", count}});
    io::json worst = io::json::object();
    for (const auto& [name, value] : rep.worst) worst[name] = value;
    return {{"format", "stinespring-fuzz"},
            {"version", io::kFormatVersion},
            {"options",
             {{"trials", o.trials},
              {"seed", o.seed},
              {"max_n", o.max_n},
              {"max_block", o.max_block},
              {"max_h", o.max_h},
              {"tol", o.tol},
              {"cutoff", o.cutoff}}},
            {"passed", rep.passed()},
            {"failed", rep.trials.size() - rep.passed()},
            {"pass", rep.pass()},
            {"worst", std::move(worst)},
            {"histogram", std::move(hist)},
            {"trials", std::move(trials)}};
}

/// The only field outside the determinism contract.
inline constexpr const char* kTimestampKey = "nondeterministic_timestamp";

inline int cmd_fuzz(const FuzzArgs& args, std::ostream& out, std::ostream& err) {
    return detail::guarded(err, [&] {
        const auto rep = run_fuzz(args.options);
        auto j = fuzz_report_to_json(rep);
        j[kTimestampKey] = static_cast<std::int64_t>(std::time(nullptr));
        if (!args.json) {
            out << "trials " << rep.trials.size() << ", passed " << rep.passed() << ", failed "
                << rep.trials.size() - rep.passed() << "\n";
            for (const auto& t : rep.trials)
                if (!t.pass) out << "  trial " << t.index << " (seed " << t.seed << "): " << t.failure << "\n";
            out << "worst residuals:\n";
            for (const auto& [name, value] : rep.worst) detail::print_row(out, name, value, args.options.tol);
            out << "(r1, r2) histogram:\n";
            for (const auto& [dims, count] : rep.histogram)
                out << "  (" << dims.first << ", " << dims.second << "): " << count << "\n";
            out << (rep.pass() ? "PASS" : "FAIL") << "\n";
        }
        detail::emit_report(j, args.report_path, args.json, out);
        return static_cast<int>(rep.pass() ? kPass : kFailedCheck);
    });
}

} // namespace stinespring::cli
