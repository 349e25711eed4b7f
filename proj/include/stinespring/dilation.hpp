#pragma once

// Minimal Stinespring-type dilation of a pair (phi, Phi).
//
// Raw space: (A (x) H1)^n with coordinates (slot i, algebra unit alpha, H1
// basis vector s), flattened as (i * dim A + alpha) * h1 + s. On it lives the
// sesquilinear form
//
//     <(i, alpha, s), (j, alpha', t)>_0 = phi_ij(e_alpha^* e_alpha')[s, t].
//
// The quotient by its null space is realised by the factor F = diag(sqrt l) V^*
// of the Gram matrix, so K1 = C^{r1} with r1 = rank. Everything else is read
// off the factor:
//
//   pi(a)      F L_a F^+           (L_a = left multiplication on the raw space)
//   S_i        F applied to 1 (x) xi in slot i
//   Psi(x)     Y_x F^+, where column (i, alpha, s) of Y_x is Phi_i(x e_alpha) e_s
//   K2         span of all Phi_i(f_gamma) e_s, carried as an isometry into H2
//   W_i        orthonormal rows spanning K2i = span Phi_i(V) H1
//
// pi and Psi are defined on a spanning set, so each comes with a
// well-definedness residual; theory makes it vanish for valid inputs.

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <numeric>
#include <optional>
#include <random>
#include <string>
#include <utility>
#include <vector>

#include "algebra.hpp"
#include "cp_map.hpp"
#include "errors.hpp"
#include "linalg.hpp"

namespace stinespring {

struct DilateOptions {
    double cutoff = kDefaultCutoff; // relative eigenvalue cutoff on the Gram matrix
    double tol = kDefaultTol;       // validity and well-definedness gate
    /// When set, the Gram matrix is eigendecomposed in a seeded permutation of
    /// the raw coordinates, which yields a different (equivalent) basis of K1.
    std::optional<std::uint64_t> basis_seed;
};

/// Singular-value cutoff matching an eigenvalue cutoff on a Gram matrix.
inline double span_cutoff(double cutoff) { return std::sqrt(cutoff); }

struct GramFactorization {
    std::size_t n = 0, dim_a = 0, h1 = 0;
    std::size_t raw_dim = 0;
    CMatrix gram;   // raw_dim x raw_dim
    std::size_t r1 = 0;
    CMatrix factor; // r1 x raw_dim, factor^* factor ~ gram
    CMatrix pinv;   // raw_dim x r1, factor * pinv = I

    std::size_t raw_index(std::size_t i, std::size_t alpha, std::size_t s) const {
        return (i * dim_a + alpha) * h1 + s;
    }
};

struct DilationData {
    std::size_t n = 0, h1 = 0, h2 = 0, dim_a = 0, dim_v = 0;
    std::size_t r1 = 0, r2 = 0;
    std::vector<CMatrix> pi;  // per algebra unit, r1 x r1
    std::vector<CMatrix> S;   // per slot, r1 x h1
    std::vector<CMatrix> psi; // per module unit, r2 x r1 (K2 coordinates)
    CMatrix k2_embed;         // h2 x r2, orthonormal columns
    std::vector<CMatrix> W;   // per slot, dim K2i x h2, orthonormal rows

    // well-definedness residuals of the last construction (0 if not built here)
    double pi_welldef = 0.0;
    double psi_welldef = 0.0;

    std::size_t k2i_dim(std::size_t i) const { return static_cast<std::size_t>(W.at(i).rows()); }

    friend bool operator==(const DilationData&, const DilationData&) = default;
};

inline GramFactorization build_gram(const CPBlockMap& cp, double cutoff = kDefaultCutoff,
                                    std::optional<std::uint64_t> basis_seed = std::nullopt) {
    const auto& alg = cp.algebra();
    GramFactorization g;
    g.n = cp.n();
    g.dim_a = alg.dim();
    g.h1 = cp.h1();
    g.raw_dim = g.n * g.dim_a * g.h1;
    const auto N = static_cast<Eigen::Index>(g.raw_dim);
    const auto h = static_cast<Eigen::Index>(g.h1);

    // e_alpha^* e_alpha' is zero unless the units share a block and row.
    g.gram = CMatrix::Zero(N, N);
    for (std::size_t alpha = 0; alpha < g.dim_a; ++alpha) {
        const std::size_t adj = alg.adjoint_index(alpha);
        for (std::size_t beta = 0; beta < g.dim_a; ++beta) {
            const auto prod = alg.product_index(adj, beta);
            if (!prod) continue;
            for (std::size_t i = 0; i < g.n; ++i)
                for (std::size_t j = 0; j < g.n; ++j)
                    g.gram.block(static_cast<Eigen::Index>(g.raw_index(i, alpha, 0)),
                                 static_cast<Eigen::Index>(g.raw_index(j, beta, 0)), h, h) =
                        cp.at(i, j, *prod);
        }
    }

    std::vector<std::size_t> perm(g.raw_dim);
    std::iota(perm.begin(), perm.end(), 0);
    if (basis_seed) {
        std::mt19937_64 rng(*basis_seed);
        std::shuffle(perm.begin(), perm.end(), rng);
    }
    CMatrix permuted(N, N);
    for (Eigen::Index k = 0; k < N; ++k)
        for (Eigen::Index l = 0; l < N; ++l) permuted(k, l) = g.gram(perm[k], perm[l]);

    // Hermitian up to rounding whenever cp satisfies the Hermiticity pattern.
    const auto eig = hermitian_eig(permuted, 1e-8);
    const auto rf = rank_truncate(eig, cutoff);
    g.r1 = rf.rank;
    g.factor = CMatrix::Zero(static_cast<Eigen::Index>(g.r1), N);
    for (Eigen::Index k = 0; k < N; ++k) g.factor.col(perm[k]) = rf.factor.col(k);
    // F F^* = diag(kept), so F^+ = F^* diag(kept)^{-1}
    g.pinv = g.factor.adjoint() * rf.kept.cwiseInverse().asDiagonal();
    return g;
}

/// F L_alpha: the factor composed with left multiplication by e_alpha.
inline CMatrix factor_times_left_mult(const GramFactorization& g, const AlgebraDescriptor& alg,
                                      std::size_t alpha) {
    CMatrix out = CMatrix::Zero(g.factor.rows(), g.factor.cols());
    for (std::size_t beta = 0; beta < g.dim_a; ++beta) {
        const auto prod = alg.product_index(alpha, beta);
        if (!prod) continue;
        for (std::size_t i = 0; i < g.n; ++i)
            for (std::size_t s = 0; s < g.h1; ++s)
                out.col(g.raw_index(i, beta, s)) = g.factor.col(g.raw_index(i, *prod, s));
    }
    return out;
}

struct PiResult {
    std::vector<CMatrix> pi;
    double welldef_residual = 0.0;
};

inline PiResult build_pi(const GramFactorization& g, const CPBlockMap& cp, double tol = kDefaultTol) {
    PiResult out;
    for (std::size_t alpha = 0; alpha < g.dim_a; ++alpha) {
        const CMatrix fl = factor_times_left_mult(g, cp.algebra(), alpha);
        CMatrix p = fl * g.pinv;
        out.welldef_residual = std::max(out.welldef_residual, rel_residual(p * g.factor, fl));
        out.pi.push_back(std::move(p));
    }
    if (out.welldef_residual > tol)
        fail(ErrorKind::WellDefinednessFailure,
             "left multiplication does not descend to the quotient (residual " +
                 std::to_string(out.welldef_residual) + ")");
    return out;
}

/// S_i xi = class of (1 (x) xi) in slot i; 1 is the sum of the diagonal units.
inline std::vector<CMatrix> build_S(const GramFactorization& g, const AlgebraDescriptor& alg) {
    const auto units = alg.unit_decomposition();
    std::vector<CMatrix> S;
    for (std::size_t i = 0; i < g.n; ++i) {
        CMatrix s = CMatrix::Zero(g.factor.rows(), static_cast<Eigen::Index>(g.h1));
        for (std::size_t u : units)
            for (std::size_t t = 0; t < g.h1; ++t) s.col(t) += g.factor.col(g.raw_index(i, u, t));
        S.push_back(std::move(s));
    }
    return S;
}

/// Y_gamma: column (i, alpha, s) is Phi_i(f_gamma e_alpha) e_s.
inline CMatrix raw_image(const GramFactorization& g, const ModuleCPTuple& t, std::size_t gamma) {
    const auto& mod = t.module();
    CMatrix y = CMatrix::Zero(static_cast<Eigen::Index>(t.h2()), static_cast<Eigen::Index>(g.raw_dim));
    for (std::size_t alpha = 0; alpha < g.dim_a; ++alpha) {
        const auto act = mod.action_index(gamma, alpha);
        if (!act) continue;
        for (std::size_t i = 0; i < g.n; ++i)
            for (std::size_t s = 0; s < g.h1; ++s)
                y.col(g.raw_index(i, alpha, s)) = t.at(i, *act).col(s);
    }
    return y;
}

/// All vectors Phi_i(f_gamma) e_s for the given slots, side by side.
inline CMatrix tuple_columns(const ModuleCPTuple& t, const std::vector<std::size_t>& slots) {
    const auto dv = t.module().dim();
    CMatrix cols(static_cast<Eigen::Index>(t.h2()),
                 static_cast<Eigen::Index>(slots.size() * dv * t.h1()));
    Eigen::Index c = 0;
    for (std::size_t i : slots)
        for (std::size_t gamma = 0; gamma < dv; ++gamma) {
            cols.middleCols(c, static_cast<Eigen::Index>(t.h1())) = t.at(i, gamma);
            c += static_cast<Eigen::Index>(t.h1());
        }
    return cols;
}

struct PsiResult {
    std::vector<CMatrix> psi;
    CMatrix k2_embed;
    std::size_t r2 = 0;
    double welldef_residual = 0.0;
};

inline PsiResult build_psi(const GramFactorization& g, const Instance& inst,
                           double cutoff = kDefaultCutoff, double tol = kDefaultTol) {
    PsiResult out;
    std::vector<std::size_t> all(inst.n());
    std::iota(all.begin(), all.end(), 0);
    // f_gamma e_alpha is again a unit (or zero), so the Phi_i(f_gamma) columns
    // already span everything Psi(V) S_i H1 can reach.
    out.k2_embed = svd_orthobasis(tuple_columns(inst.tuple, all), span_cutoff(cutoff));
    out.r2 = static_cast<std::size_t>(out.k2_embed.cols());

    for (std::size_t gamma = 0; gamma < inst.module().dim(); ++gamma) {
        const CMatrix y = raw_image(g, inst.tuple, gamma);
        CMatrix p = out.k2_embed.adjoint() * y * g.pinv;
        out.welldef_residual =
            std::max(out.welldef_residual, rel_residual(out.k2_embed * p * g.factor, y));
        out.psi.push_back(std::move(p));
    }
    if (out.welldef_residual > tol)
        fail(ErrorKind::WellDefinednessFailure,
             "Psi is not well defined on the quotient (residual " +
                 std::to_string(out.welldef_residual) + ")");
    return out;
}

/// W_i rows: an orthonormal basis of K2i = span Phi_i(V) H1 in H2 coordinates.
inline std::vector<CMatrix> build_W(const ModuleCPTuple& t, double cutoff = kDefaultCutoff) {
    std::vector<CMatrix> W;
    for (std::size_t i = 0; i < t.n(); ++i)
        W.push_back(svd_orthobasis(tuple_columns(t, {i}), span_cutoff(cutoff)).adjoint());
    return W;
}

inline DilationData dilate(const Instance& inst, const DilateOptions& opts = {}) {
    check_raw_dim(inst.n(), inst.algebra().dim(), inst.h1());
    if (!is_completely_n_positive(inst.cp, opts.tol))
        fail(ErrorKind::NotPSD, "phi is not completely n-positive (a Choi block is indefinite)");
    const double compat = verify_compatibility(inst);
    if (compat > opts.tol)
        fail(ErrorKind::NotCompatible,
             "Phi is not phi-compatible (residual " + std::to_string(compat) + ")");

    const auto g = build_gram(inst.cp, opts.cutoff, opts.basis_seed);
    auto pi = build_pi(g, inst.cp, opts.tol);
    auto psi = build_psi(g, inst, opts.cutoff, opts.tol);

    DilationData d;
    d.n = inst.n();
    d.h1 = inst.h1();
    d.h2 = inst.h2();
    d.dim_a = inst.algebra().dim();
    d.dim_v = inst.module().dim();
    d.r1 = g.r1;
    d.r2 = psi.r2;
    d.pi = std::move(pi.pi);
    d.S = build_S(g, inst.algebra());
    d.psi = std::move(psi.psi);
    d.k2_embed = std::move(psi.k2_embed);
    d.W = build_W(inst.tuple, opts.cutoff);
    d.pi_welldef = pi.welldef_residual;
    d.psi_welldef = psi.welldef_residual;
    return d;
}

/// Raise ShapeMismatch unless `d` has the shapes a dilation of `inst` must have.
inline void check_shapes(const Instance& inst, const DilationData& d) {
    auto need = [](bool ok, const std::string& what) {
        if (!ok) fail(ErrorKind::ShapeMismatch, what);
    };
    const auto r1 = static_cast<Eigen::Index>(d.r1);
    const auto r2 = static_cast<Eigen::Index>(d.r2);
    need(d.n == inst.n() && d.h1 == inst.h1() && d.h2 == inst.h2(), "n/h1/h2 differ from instance");
    need(d.dim_a == inst.algebra().dim() && d.dim_v == inst.module().dim(),
         "algebra/module dimensions differ from instance");
    need(d.pi.size() == d.dim_a, "pi must have one matrix per algebra unit");
    for (const auto& m : d.pi) need(m.rows() == r1 && m.cols() == r1, "pi matrices must be r1 x r1");
    need(d.S.size() == d.n, "S must have n matrices");
    for (const auto& m : d.S)
        need(m.rows() == r1 && m.cols() == static_cast<Eigen::Index>(d.h1), "S matrices must be r1 x h1");
    need(d.psi.size() == d.dim_v, "psi must have one matrix per module unit");
    for (const auto& m : d.psi) need(m.rows() == r2 && m.cols() == r1, "psi matrices must be r2 x r1");
    need(d.k2_embed.rows() == static_cast<Eigen::Index>(d.h2) && d.k2_embed.cols() == r2,
         "k2_embed must be h2 x r2");
    need(d.W.size() == d.n, "W must have n matrices");
    for (const auto& m : d.W) need(m.cols() == static_cast<Eigen::Index>(d.h2), "W matrices must have h2 columns");
}

struct VerificationReport {
    double phi_reconstruction = 0.0;
    double Phi_reconstruction = 0.0; // worst of the direct and projected readings
    double Phi_reading_gap = 0.0;    // direct vs projected reading
    double pi_multiplicativity = 0.0;
    double pi_star = 0.0;
    double pi_unital = 0.0;
    double psi_representation = 0.0;
    double psi_module_action = 0.0;
    double psi_contractivity_excess = 0.0;
    double w_coisometry = 0.0; // includes k2_embed^* k2_embed = I
    double minimality_k1_defect = 0.0;
    double minimality_k2_defect = 0.0;
    /// ||S_i^* S_i - I||_F^{1/2}; equals ||phi_ii(1) - I||_F^{1/2} for an exact dilation.
    std::vector<double> s_isometry_defect;
    bool all_unital = true; // every phi_ii(1) = I within tolerance
    double tol = kDefaultTol;
    bool pass = false;

    /// Residuals that decide `pass`, in a fixed order.
    std::vector<std::pair<std::string, double>> gated() const {
        return {{"phi_reconstruction", phi_reconstruction},
                {"Phi_reconstruction", Phi_reconstruction},
                {"Phi_reading_gap", Phi_reading_gap},
                {"pi_multiplicativity", pi_multiplicativity},
                {"pi_star", pi_star},
                {"pi_unital", pi_unital},
                {"psi_representation", psi_representation},
                {"psi_module_action", psi_module_action},
                {"psi_contractivity_excess", psi_contractivity_excess},
                {"w_coisometry", w_coisometry},
                {"minimality_k1_defect", minimality_k1_defect},
                {"minimality_k2_defect", minimality_k2_defect}};
    }

    double worst_isometry_squared() const {
        double w = 0.0;
        for (double d : s_isometry_defect) w = std::max(w, d * d);
        return w;
    }
};

inline VerificationReport verify_dilation(const Instance& inst, const DilationData& d,
                                          double tol = kDefaultTol,
                                          double rank_cutoff = span_cutoff(kDefaultCutoff)) {
    check_shapes(inst, d);
    const auto& alg = inst.algebra();
    const auto& mod = inst.module();
    const auto r1 = static_cast<Eigen::Index>(d.r1);
    const auto r2 = static_cast<Eigen::Index>(d.r2);
    const auto h1 = static_cast<Eigen::Index>(d.h1);
    const CMatrix zero_r1 = CMatrix::Zero(r1, r1);

    VerificationReport rep;
    rep.tol = tol;

    for (std::size_t i = 0; i < d.n; ++i)
        for (std::size_t j = 0; j < d.n; ++j)
            for (std::size_t a = 0; a < d.dim_a; ++a)
                rep.phi_reconstruction =
                    std::max(rep.phi_reconstruction,
                             rel_residual(d.S[i].adjoint() * d.pi[a] * d.S[j], inst.cp.at(i, j, a)));

    for (std::size_t i = 0; i < d.n; ++i) {
        const CMatrix proj = d.W[i].adjoint() * d.W[i];
        for (std::size_t g = 0; g < d.dim_v; ++g) {
            const CMatrix direct = d.k2_embed * d.psi[g] * d.S[i];
            const CMatrix projected = proj * direct;
            const CMatrix& target = inst.tuple.at(i, g);
            rep.Phi_reconstruction = std::max({rep.Phi_reconstruction, rel_residual(direct, target),
                                               rel_residual(projected, target)});
            rep.Phi_reading_gap = std::max(rep.Phi_reading_gap, rel_residual(projected, direct));
        }
    }

    for (std::size_t a = 0; a < d.dim_a; ++a) {
        for (std::size_t b = 0; b < d.dim_a; ++b) {
            const auto prod = alg.product_index(a, b);
            const CMatrix& expect = prod ? d.pi[*prod] : zero_r1;
            rep.pi_multiplicativity =
                std::max(rep.pi_multiplicativity, rel_residual(d.pi[a] * d.pi[b], expect));
        }
        rep.pi_star = std::max(rep.pi_star, rel_residual(d.pi[alg.adjoint_index(a)], d.pi[a].adjoint()));
    }
    CMatrix pi_one = CMatrix::Zero(r1, r1);
    for (std::size_t u : alg.unit_decomposition()) pi_one += d.pi[u];
    rep.pi_unital = rel_residual(pi_one, identity(r1));

    for (std::size_t g = 0; g < d.dim_v; ++g) {
        for (std::size_t e = 0; e < d.dim_v; ++e) {
            const auto unit = mod.inner_index(g, e);
            const CMatrix& expect = unit ? d.pi[*unit] : zero_r1;
            rep.psi_representation =
                std::max(rep.psi_representation, rel_residual(d.psi[g].adjoint() * d.psi[e], expect));
        }
        for (std::size_t a = 0; a < d.dim_a; ++a) {
            const auto act = mod.action_index(g, a);
            const CMatrix expect = act ? d.psi[*act] : CMatrix::Zero(r2, r1);
            rep.psi_module_action =
                std::max(rep.psi_module_action, rel_residual(d.psi[g] * d.pi[a], expect));
        }
        // module units have norm 1
        rep.psi_contractivity_excess =
            std::max(rep.psi_contractivity_excess, spectral_norm(d.psi[g]) - 1.0);
    }

    rep.w_coisometry = rel_residual(d.k2_embed.adjoint() * d.k2_embed, identity(r2));
    for (const auto& w : d.W)
        rep.w_coisometry = std::max(rep.w_coisometry, rel_residual(w * w.adjoint(), identity(w.rows())));

    CMatrix k1_span(r1, static_cast<Eigen::Index>(d.dim_a * d.n) * h1);
    CMatrix k2_span(r2, static_cast<Eigen::Index>(d.dim_v * d.n) * h1);
    Eigen::Index c1 = 0, c2 = 0;
    for (std::size_t i = 0; i < d.n; ++i) {
        for (std::size_t a = 0; a < d.dim_a; ++a, c1 += h1) k1_span.middleCols(c1, h1) = d.pi[a] * d.S[i];
        for (std::size_t g = 0; g < d.dim_v; ++g, c2 += h1) k2_span.middleCols(c2, h1) = d.psi[g] * d.S[i];
    }
    rep.minimality_k1_defect = static_cast<double>(d.r1 - numerical_rank(k1_span, rank_cutoff));
    rep.minimality_k2_defect = static_cast<double>(d.r2 - numerical_rank(k2_span, rank_cutoff));

    for (std::size_t i = 0; i < d.n; ++i) {
        rep.s_isometry_defect.push_back(std::sqrt(frob(d.S[i].adjoint() * d.S[i] - identity(h1))));
        if (frob(phi_of_identity(inst.cp, i) - identity(h1)) > tol) rep.all_unital = false;
    }

    rep.pass = true;
    for (const auto& [name, value] : rep.gated())
        if (!(value <= tol)) rep.pass = false;
    if (rep.all_unital && !(rep.worst_isometry_squared() <= tol)) rep.pass = false;
    return rep;
}

} // namespace stinespring
