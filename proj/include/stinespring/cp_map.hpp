#pragma once

// Completely n-positive families [phi_ij]: A -> L(H1) and phi-compatible
// tuples Phi = (Phi_1, ..., Phi_n): V -> L(H1, H2), both stored by their
// action on the canonical matrix units and extended linearly.
//
// Complete n-positivity is tested block by block on Choi matrices. For
// A = (+)_b M_{d_b} the map [phi]: M_n(A) -> M_n(L(H1)) is completely positive
// iff for every block b the matrix
//
//     C_b[(i,p,s), (j,q,t)] = phi_ij(e^b_{pq})[s, t]
//
// is positive semidefinite. This is the usual Choi criterion applied to each
// summand M_n(M_{d_b}) = M_{n d_b}; the entries of the full Choi matrix of
// [phi] that mix different (i, j) slots vanish, so it compresses to C_b.

#include <cstddef>
#include <cstdint>
#include <map>
#include <optional>
#include <string>
#include <vector>

#include "algebra.hpp"
#include "errors.hpp"
#include "linalg.hpp"

namespace stinespring {

/// Default tolerance for every validity gate.
inline constexpr double kDefaultTol = 1e-9;

/// Largest admissible raw Gram dimension n * dim(A) * h1.
inline constexpr std::size_t kMaxRawDim = 10000;

inline void check_raw_dim(std::size_t n, std::size_t dim_a, std::size_t h1) {
    if (n * dim_a * h1 > kMaxRawDim)
        fail(ErrorKind::DimensionTooLarge, "raw Gram dimension " + std::to_string(n * dim_a * h1) +
                                               " exceeds " + std::to_string(kMaxRawDim));
}

class CPBlockMap {
public:
    CPBlockMap() = default;

    /// `action[(i * n + j) * dim_A + alpha]` holds phi_ij(e_alpha) as an h1 x h1
    /// matrix. The Hermiticity pattern phi_ij(a^*) = phi_ji(a)^* is checked here.
    CPBlockMap(std::size_t n, AlgebraDescriptor algebra, std::size_t h1,
               std::vector<CMatrix> action, double herm_tol = kDefaultTol)
        : n_(n), algebra_(std::move(algebra)), h1_(h1), action_(std::move(action)) {
        if (n_ == 0) fail(ErrorKind::DimensionTooSmall, "n must be at least 1");
        if (action_.size() != n_ * n_ * algebra_.dim())
            fail(ErrorKind::ShapeMismatch, "expected " + std::to_string(n_ * n_ * algebra_.dim()) +
                                               " action matrices, got " +
                                               std::to_string(action_.size()));
        for (const auto& m : action_) {
            if (m.rows() != static_cast<Eigen::Index>(h1_) ||
                m.cols() != static_cast<Eigen::Index>(h1_))
                fail(ErrorKind::ShapeMismatch, "phi action matrices must be h1 x h1");
            if (!all_finite(m)) fail(ErrorKind::ShapeMismatch, "non-finite entry in phi action");
        }
        const double defect = hermiticity_defect();
        if (defect > herm_tol)
            fail(ErrorKind::HermiticityViolation,
                 "phi_ij(a*) != phi_ji(a)*, relative defect " + std::to_string(defect));
    }

    std::size_t n() const { return n_; }
    std::size_t h1() const { return h1_; }
    const AlgebraDescriptor& algebra() const { return algebra_; }
    const std::vector<CMatrix>& action() const { return action_; }

    const CMatrix& at(std::size_t i, std::size_t j, std::size_t alpha) const {
        return action_[(i * n_ + j) * algebra_.dim() + alpha];
    }
    CMatrix& at(std::size_t i, std::size_t j, std::size_t alpha) {
        return action_[(i * n_ + j) * algebra_.dim() + alpha];
    }

    /// max over (i, j, alpha) of the relative gap between phi_ij(e_alpha^*) and phi_ji(e_alpha)^*.
    double hermiticity_defect() const {
        double worst = 0.0;
        for (std::size_t i = 0; i < n_; ++i)
            for (std::size_t j = 0; j < n_; ++j)
                for (std::size_t a = 0; a < algebra_.dim(); ++a)
                    worst = std::max(worst, rel_residual(at(i, j, algebra_.adjoint_index(a)),
                                                         at(j, i, a).adjoint()));
        return worst;
    }

    friend bool operator==(const CPBlockMap&, const CPBlockMap&) = default;

private:
    std::size_t n_ = 0;
    AlgebraDescriptor algebra_;
    std::size_t h1_ = 0;
    std::vector<CMatrix> action_;
};

class ModuleCPTuple {
public:
    ModuleCPTuple() = default;

    /// `action[i * dim_V + gamma]` holds Phi_i(f_gamma) as an h2 x h1 matrix.
    ModuleCPTuple(std::size_t n, ModuleDescriptor module, std::size_t h1, std::size_t h2,
                  std::vector<CMatrix> action)
        : n_(n), module_(std::move(module)), h1_(h1), h2_(h2), action_(std::move(action)) {
        if (n_ == 0) fail(ErrorKind::DimensionTooSmall, "n must be at least 1");
        if (action_.size() != n_ * module_.dim())
            fail(ErrorKind::ShapeMismatch, "expected " + std::to_string(n_ * module_.dim()) +
                                               " action matrices, got " +
                                               std::to_string(action_.size()));
        for (const auto& m : action_) {
            if (m.rows() != static_cast<Eigen::Index>(h2_) ||
                m.cols() != static_cast<Eigen::Index>(h1_))
                fail(ErrorKind::ShapeMismatch, "Phi action matrices must be h2 x h1");
            if (!all_finite(m)) fail(ErrorKind::ShapeMismatch, "non-finite entry in Phi action");
        }
    }

    std::size_t n() const { return n_; }
    std::size_t h1() const { return h1_; }
    std::size_t h2() const { return h2_; }
    const ModuleDescriptor& module() const { return module_; }
    const std::vector<CMatrix>& action() const { return action_; }

    const CMatrix& at(std::size_t i, std::size_t gamma) const {
        return action_[i * module_.dim() + gamma];
    }
    CMatrix& at(std::size_t i, std::size_t gamma) { return action_[i * module_.dim() + gamma]; }

    friend bool operator==(const ModuleCPTuple&, const ModuleCPTuple&) = default;

private:
    std::size_t n_ = 0;
    ModuleDescriptor module_;
    std::size_t h1_ = 0, h2_ = 0;
    std::vector<CMatrix> action_;
};

/// Where an instance came from; free-form key/value pairs for generated ones.
struct Provenance {
    std::optional<std::uint64_t> seed;
    std::map<std::string, std::string> meta;

    friend bool operator==(const Provenance&, const Provenance&) = default;
};

struct Instance {
    CPBlockMap cp;
    ModuleCPTuple tuple;
    Provenance provenance;

    Instance() = default;
    Instance(CPBlockMap c, ModuleCPTuple t, Provenance p = {})
        : cp(std::move(c)), tuple(std::move(t)), provenance(std::move(p)) {
        if (cp.n() != tuple.n()) fail(ErrorKind::ShapeMismatch, "cp.n != tuple.n");
        if (cp.h1() != tuple.h1()) fail(ErrorKind::ShapeMismatch, "cp.h1 != tuple.h1");
        if (!(cp.algebra() == tuple.module().algebra()))
            fail(ErrorKind::ShapeMismatch, "cp and tuple are over different algebras");
    }

    std::size_t n() const { return cp.n(); }
    std::size_t h1() const { return cp.h1(); }
    std::size_t h2() const { return tuple.h2(); }
    const AlgebraDescriptor& algebra() const { return cp.algebra(); }
    const ModuleDescriptor& module() const { return tuple.module(); }

    friend bool operator==(const Instance&, const Instance&) = default;
};

inline CMatrix apply_phi(const CPBlockMap& cp, std::size_t i, std::size_t j, const AlgebraElement& a) {
    if (i >= cp.n() || j >= cp.n())
        fail(ErrorKind::IndexOutOfRange, "phi index (" + std::to_string(i) + ", " +
                                             std::to_string(j) + ") with n = " + std::to_string(cp.n()));
    if (!(a.descriptor() == cp.algebra()))
        fail(ErrorKind::DescriptorMismatch, "element is not in the domain algebra of phi");
    CMatrix out = CMatrix::Zero(cp.h1(), cp.h1());
    for (std::size_t alpha = 0; alpha < cp.algebra().dim(); ++alpha) {
        const cplx c = a.coeff(alpha);
        if (c != cplx(0.0)) out += c * cp.at(i, j, alpha);
    }
    return out;
}

inline CMatrix apply_Phi(const ModuleCPTuple& t, std::size_t i, const ModuleElement& x) {
    if (i >= t.n())
        fail(ErrorKind::IndexOutOfRange, "Phi index " + std::to_string(i) + " with n = " + std::to_string(t.n()));
    if (!(x.descriptor() == t.module()))
        fail(ErrorKind::DescriptorMismatch, "element is not in the domain module of Phi");
    CMatrix out = CMatrix::Zero(t.h2(), t.h1());
    for (std::size_t gamma = 0; gamma < t.module().dim(); ++gamma) {
        const cplx c = x.coeff(gamma);
        if (c != cplx(0.0)) out += c * t.at(i, gamma);
    }
    return out;
}

/// Choi matrix of [phi] on algebra block b, indexed by (slot i, row p, H1 index s).
inline CMatrix choi_matrix(const CPBlockMap& cp, std::size_t b) {
    if (b >= cp.algebra().num_blocks())
        fail(ErrorKind::IndexOutOfRange, "block " + std::to_string(b));
    const std::size_t d = cp.algebra().block_dim(b);
    const std::size_t h = cp.h1();
    const std::size_t side = cp.n() * d * h;
    CMatrix out(side, side);
    for (std::size_t i = 0; i < cp.n(); ++i)
        for (std::size_t p = 0; p < d; ++p)
            for (std::size_t j = 0; j < cp.n(); ++j)
                for (std::size_t q = 0; q < d; ++q)
                    out.block((i * d + p) * h, (j * d + q) * h, h, h) =
                        cp.at(i, j, cp.algebra().basis_index(b, p, q));
    return out;
}

/// Choi matrix of the single map phi_ii on block b.
inline CMatrix diagonal_choi_matrix(const CPBlockMap& cp, std::size_t i, std::size_t b) {
    const std::size_t d = cp.algebra().block_dim(b);
    const std::size_t h = cp.h1();
    CMatrix out(d * h, d * h);
    for (std::size_t p = 0; p < d; ++p)
        for (std::size_t q = 0; q < d; ++q)
            out.block(p * h, q * h, h, h) = cp.at(i, i, cp.algebra().basis_index(b, p, q));
    return out;
}

namespace detail {

inline bool psd_at(const CMatrix& m, double tol) {
    if (m.rows() == 0) return true;
    // Hermiticity is already enforced on the action; rounding may leave a tiny
    // asymmetry, which hermitian_eig removes.
    const auto e = hermitian_eig(m, 1e-8);
    const double lmax = e.eigenvalues(0);
    const double lmin = e.eigenvalues(e.eigenvalues.size() - 1);
    return lmin >= -tol * std::max(lmax, 1.0);
}

} // namespace detail

inline bool is_completely_n_positive(const CPBlockMap& cp, double tol = kDefaultTol) {
    if (cp.hermiticity_defect() > tol)
        fail(ErrorKind::HermiticityViolation, "cannot test positivity of a non-Hermitian family");
    for (std::size_t b = 0; b < cp.algebra().num_blocks(); ++b)
        if (!detail::psd_at(choi_matrix(cp, b), tol)) return false;
    return true;
}

inline bool diagonal_is_cp(const CPBlockMap& cp, std::size_t i, double tol = kDefaultTol) {
    if (i >= cp.n()) fail(ErrorKind::IndexOutOfRange, "diagonal index " + std::to_string(i));
    for (std::size_t b = 0; b < cp.algebra().num_blocks(); ++b)
        if (!detail::psd_at(diagonal_choi_matrix(cp, i, b), tol)) return false;
    return true;
}

/// Largest relative defect of <Phi_i(f_g), Phi_j(f_d)> = phi_ij(<f_g, f_d>) over
/// all slot pairs and module basis pairs. Sesquilinearity makes the basis enough.
inline double verify_compatibility(const Instance& inst) {
    const auto& mod = inst.module();
    const std::size_t h1 = inst.h1();
    const CMatrix zero = CMatrix::Zero(h1, h1);
    double worst = 0.0;
    for (std::size_t i = 0; i < inst.n(); ++i)
        for (std::size_t j = 0; j < inst.n(); ++j)
            for (std::size_t g = 0; g < mod.dim(); ++g)
                for (std::size_t d = 0; d < mod.dim(); ++d) {
                    const CMatrix lhs = inst.tuple.at(i, g).adjoint() * inst.tuple.at(j, d);
                    const auto unit = mod.inner_index(g, d);
                    const CMatrix& rhs = unit ? inst.cp.at(i, j, *unit) : zero;
                    worst = std::max(worst, rel_residual(lhs, rhs));
                }
    return worst;
}

/// phi_ii(1) as a matrix.
inline CMatrix phi_of_identity(const CPBlockMap& cp, std::size_t i) {
    return apply_phi(cp, i, i, AlgebraElement::identity(cp.algebra()));
}

} // namespace stinespring
