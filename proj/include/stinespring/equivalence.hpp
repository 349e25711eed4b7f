#pragma once

// Uniqueness of minimal dilations up to unitary equivalence. Given two minimal
// dilations of the same instance, U1 is pinned down on the spanning family
// pi(e_alpha) S_i e_s of K1 and U2 on Psi(f_gamma) S_i e_s of K2:
//
//     U1 pi(e_alpha) S_i e_s = pi'(e_alpha) S_i' e_s
//     U2 Psi(f_gamma) S_i e_s = Psi'(f_gamma) S_i' e_s
//
// Each is one least-squares solve over the whole family; a large residual or
// a non-unitary solution means the two data do not dilate the same pair.

#include <algorithm>
#include <string>
#include <utility>
#include <vector>

#include "cp_map.hpp"
#include "dilation.hpp"
#include "errors.hpp"
#include "linalg.hpp"

namespace stinespring {

struct EquivalenceWitness {
    CMatrix U1; // r1' x r1
    CMatrix U2; // r2' x r2

    double u1_unitarity = 0.0;
    double u2_unitarity = 0.0;
    double u1_S_intertwine = 0.0;
    double u1_pi_intertwine = 0.0;
    double u2_W_intertwine = 0.0;
    double u2_psi_intertwine = 0.0;

    // residuals of the two least-squares solves
    double u1_solve = 0.0;
    double u2_solve = 0.0;

    std::vector<std::pair<std::string, double>> diagram() const {
        return {{"u1_unitarity", u1_unitarity},         {"u2_unitarity", u2_unitarity},
                {"u1_S_intertwine", u1_S_intertwine},   {"u1_pi_intertwine", u1_pi_intertwine},
                {"u2_W_intertwine", u2_W_intertwine},   {"u2_psi_intertwine", u2_psi_intertwine}};
    }
};

/// Columns pi(e_alpha) S_i e_s over all (i, alpha, s).
inline CMatrix k1_spanning_family(const DilationData& d) {
    const auto h1 = static_cast<Eigen::Index>(d.h1);
    CMatrix out(static_cast<Eigen::Index>(d.r1), static_cast<Eigen::Index>(d.n * d.dim_a) * h1);
    Eigen::Index c = 0;
    for (std::size_t i = 0; i < d.n; ++i)
        for (std::size_t a = 0; a < d.dim_a; ++a, c += h1) out.middleCols(c, h1) = d.pi[a] * d.S[i];
    return out;
}

/// Columns Psi(f_gamma) S_i e_s over all (i, gamma, s).
inline CMatrix k2_spanning_family(const DilationData& d) {
    const auto h1 = static_cast<Eigen::Index>(d.h1);
    CMatrix out(static_cast<Eigen::Index>(d.r2), static_cast<Eigen::Index>(d.n * d.dim_v) * h1);
    Eigen::Index c = 0;
    for (std::size_t i = 0; i < d.n; ++i)
        for (std::size_t g = 0; g < d.dim_v; ++g, c += h1) out.middleCols(c, h1) = d.psi[g] * d.S[i];
    return out;
}

/// W_i read as a map H2 -> K2 (K2 coordinates): k2^* W_i^* W_i.
inline CMatrix w_in_k2(const DilationData& d, std::size_t i) {
    return d.k2_embed.adjoint() * d.W[i].adjoint() * d.W[i];
}

inline double unitarity_defect(const CMatrix& u) {
    if (u.rows() != u.cols()) return 1.0 + std::abs(static_cast<double>(u.rows() - u.cols()));
    return std::max(rel_residual(u.adjoint() * u, identity(u.cols())),
                    rel_residual(u * u.adjoint(), identity(u.rows())));
}

inline void check_pair_shapes(const Instance& inst, const DilationData& a, const DilationData& b) {
    check_shapes(inst, a);
    check_shapes(inst, b);
}

/// Fill in the six diagram residuals of `w` for the given pair.
inline void diagram_residuals(EquivalenceWitness& w, const DilationData& a, const DilationData& b) {
    w.u1_unitarity = unitarity_defect(w.U1);
    w.u2_unitarity = unitarity_defect(w.U2);
    w.u1_S_intertwine = w.u1_pi_intertwine = w.u2_W_intertwine = w.u2_psi_intertwine = 0.0;
    const bool k1_ok = w.U1.rows() == static_cast<Eigen::Index>(b.r1) &&
                       w.U1.cols() == static_cast<Eigen::Index>(a.r1);
    const bool k2_ok = w.U2.rows() == static_cast<Eigen::Index>(b.r2) &&
                       w.U2.cols() == static_cast<Eigen::Index>(a.r2);
    if (!k1_ok || !k2_ok) fail(ErrorKind::ShapeMismatch, "witness unitaries have the wrong shape");

    for (std::size_t i = 0; i < a.n; ++i) {
        w.u1_S_intertwine = std::max(w.u1_S_intertwine, rel_residual(w.U1 * a.S[i], b.S[i]));
        w.u2_W_intertwine = std::max(w.u2_W_intertwine, rel_residual(w.U2 * w_in_k2(a, i), w_in_k2(b, i)));
    }
    for (std::size_t al = 0; al < a.dim_a; ++al)
        w.u1_pi_intertwine =
            std::max(w.u1_pi_intertwine, rel_residual(w.U1 * a.pi[al], b.pi[al] * w.U1));
    for (std::size_t g = 0; g < a.dim_v; ++g)
        w.u2_psi_intertwine =
            std::max(w.u2_psi_intertwine, rel_residual(w.U2 * a.psi[g], b.psi[g] * w.U1));
}

inline EquivalenceWitness build_unitaries(const Instance& inst, const DilationData& a,
                                          const DilationData& b, double tol = kDefaultTol,
                                          double rank_cutoff = span_cutoff(kDefaultCutoff)) {
    check_pair_shapes(inst, a, b);

    const CMatrix ca = k1_spanning_family(a), cb = k1_spanning_family(b);
    const CMatrix da = k2_spanning_family(a), db = k2_spanning_family(b);
    if (numerical_rank(ca, rank_cutoff) != a.r1 || numerical_rank(cb, rank_cutoff) != b.r1)
        fail(ErrorKind::NotMinimal, "K1 is not spanned by pi(A) S_i H1");
    if (numerical_rank(da, rank_cutoff) != a.r2 || numerical_rank(db, rank_cutoff) != b.r2)
        fail(ErrorKind::NotMinimal, "K2 is not spanned by Psi(V) S_i H1");
    if (a.r1 != b.r1 || a.r2 != b.r2)
        fail(ErrorKind::InconsistentSpans, "dimensions differ: (r1, r2) = (" + std::to_string(a.r1) +
                                               ", " + std::to_string(a.r2) + ") vs (" +
                                               std::to_string(b.r1) + ", " + std::to_string(b.r2) + ")");

    EquivalenceWitness w;
    // U ca = cb  <=>  ca^* U^* = cb^*
    const auto s1 = solve_lsq(ca.adjoint(), cb.adjoint());
    const auto s2 = solve_lsq(da.adjoint(), db.adjoint());
    w.U1 = s1.X.adjoint();
    w.U2 = s2.X.adjoint();
    w.u1_solve = s1.residual;
    w.u2_solve = s2.residual;
    diagram_residuals(w, a, b);

    const double worst = std::max({w.u1_solve, w.u2_solve, w.u1_unitarity, w.u2_unitarity});
    if (worst > tol)
        fail(ErrorKind::InconsistentSpans,
             "spanning families are not related by a unitary (worst residual " +
                 std::to_string(worst) + ")");
    return w;
}

inline bool verify_diagram(EquivalenceWitness& w, const Instance& inst, const DilationData& a,
                           const DilationData& b, double tol = kDefaultTol) {
    check_pair_shapes(inst, a, b);
    diagram_residuals(w, a, b);
    for (const auto& [name, value] : w.diagram())
        if (!(value <= tol)) return false;
    return true;
}

/// The dilation transported along unitaries q1 on K1 and q2 on K2:
/// S' = q1 S, pi' = q1 pi q1^*, Psi' = q2 Psi q1^*, K2 embedding k2 q2^*.
/// W is intrinsic to H2 and unchanged.
inline DilationData rotate_dilation(const DilationData& d, const CMatrix& q1, const CMatrix& q2) {
    if (q1.rows() != static_cast<Eigen::Index>(d.r1) || q1.cols() != static_cast<Eigen::Index>(d.r1) ||
        q2.rows() != static_cast<Eigen::Index>(d.r2) || q2.cols() != static_cast<Eigen::Index>(d.r2))
        fail(ErrorKind::ShapeMismatch, "rotation unitaries must be r1 x r1 and r2 x r2");
    DilationData out = d;
    for (auto& s : out.S) s = q1 * s;
    for (auto& p : out.pi) p = q1 * p * q1.adjoint();
    for (auto& p : out.psi) p = q2 * p * q1.adjoint();
    out.k2_embed = d.k2_embed * q2.adjoint();
    return out;
}

} // namespace stinespring
