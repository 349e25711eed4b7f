#pragma once

// Finite-dimensional C*-algebra A = (+)_b M_{d_b}(C) and the Hilbert A-module
// V = (+)_b C^{k_b x d_b}, with right action x.a = (x_b a_b) and inner product
// <x, y> = (x_b^* y_b).
//
// Canonical bases: matrix units e^b_{pq} of A ordered by (b, p, q) and
// f^b_{rq} of V ordered by (b, r, q).

#include <algorithm>
#include <cstddef>
#include <optional>
#include <string>
#include <vector>

#include "errors.hpp"
#include "linalg.hpp"

namespace stinespring {

struct AlgebraBasisIndex {
    std::size_t block, row, col;
};

struct ModuleBasisIndex {
    std::size_t block, row, col;
};

class AlgebraDescriptor {
public:
    AlgebraDescriptor() = default;

    explicit AlgebraDescriptor(std::vector<std::size_t> block_dims)
        : dims_(std::move(block_dims)) {
        if (dims_.empty()) fail(ErrorKind::DimensionTooSmall, "algebra needs at least one block");
        offsets_.reserve(dims_.size());
        std::size_t off = 0;
        for (std::size_t d : dims_) {
            if (d == 0) fail(ErrorKind::DimensionTooSmall, "algebra block of dimension 0");
            offsets_.push_back(off);
            off += d * d;
        }
        dim_ = off;
    }

    const std::vector<std::size_t>& block_dims() const { return dims_; }
    std::size_t num_blocks() const { return dims_.size(); }
    std::size_t block_dim(std::size_t b) const { return dims_.at(b); }
    std::size_t dim() const { return dim_; }

    std::size_t basis_index(std::size_t b, std::size_t p, std::size_t q) const {
        return offsets_[b] + p * dims_[b] + q;
    }

    AlgebraBasisIndex basis(std::size_t alpha) const {
        if (alpha >= dim_) fail(ErrorKind::IndexOutOfRange, "algebra basis index " + std::to_string(alpha));
        std::size_t b = 0;
        while (b + 1 < dims_.size() && offsets_[b + 1] <= alpha) ++b;
        const std::size_t local = alpha - offsets_[b];
        return {b, local / dims_[b], local % dims_[b]};
    }

    /// Index of e_alpha^*.
    std::size_t adjoint_index(std::size_t alpha) const {
        const auto [b, p, q] = basis(alpha);
        return basis_index(b, q, p);
    }

    /// e_alpha e_beta is either zero or a single matrix unit.
    std::optional<std::size_t> product_index(std::size_t alpha, std::size_t beta) const {
        const auto x = basis(alpha);
        const auto y = basis(beta);
        if (x.block != y.block || x.col != y.row) return std::nullopt;
        return basis_index(x.block, x.row, y.col);
    }

    /// Basis indices of the diagonal units e^b_{pp}; they sum to the identity.
    std::vector<std::size_t> unit_decomposition() const {
        std::vector<std::size_t> out;
        for (std::size_t b = 0; b < dims_.size(); ++b)
            for (std::size_t p = 0; p < dims_[b]; ++p) out.push_back(basis_index(b, p, p));
        return out;
    }

    friend bool operator==(const AlgebraDescriptor&, const AlgebraDescriptor&) = default;

private:
    std::vector<std::size_t> dims_;
    std::vector<std::size_t> offsets_;
    std::size_t dim_ = 0;
};

class ModuleDescriptor {
public:
    ModuleDescriptor() = default;

    ModuleDescriptor(AlgebraDescriptor algebra, std::vector<std::size_t> mults)
        : algebra_(std::move(algebra)), mults_(std::move(mults)) {
        if (mults_.size() != algebra_.num_blocks())
            fail(ErrorKind::DescriptorMismatch,
                 "module has " + std::to_string(mults_.size()) + " multiplicities for " +
                     std::to_string(algebra_.num_blocks()) + " algebra blocks");
        if (std::all_of(mults_.begin(), mults_.end(), [](std::size_t k) { return k == 0; }))
            fail(ErrorKind::DimensionTooSmall, "module needs some nonzero multiplicity");
        std::size_t off = 0;
        for (std::size_t b = 0; b < mults_.size(); ++b) {
            offsets_.push_back(off);
            off += mults_[b] * algebra_.block_dim(b);
        }
        dim_ = off;
    }

    const AlgebraDescriptor& algebra() const { return algebra_; }
    const std::vector<std::size_t>& mults() const { return mults_; }
    std::size_t mult(std::size_t b) const { return mults_.at(b); }
    std::size_t dim() const { return dim_; }

    /// Every block of A acts nontrivially; reported, never required.
    bool is_full() const {
        return std::all_of(mults_.begin(), mults_.end(), [](std::size_t k) { return k > 0; });
    }

    std::size_t basis_index(std::size_t b, std::size_t r, std::size_t q) const {
        return offsets_[b] + r * algebra_.block_dim(b) + q;
    }

    ModuleBasisIndex basis(std::size_t gamma) const {
        if (gamma >= dim_) fail(ErrorKind::IndexOutOfRange, "module basis index " + std::to_string(gamma));
        std::size_t b = 0;
        while (b + 1 < mults_.size() && offsets_[b + 1] <= gamma) ++b;
        const std::size_t local = gamma - offsets_[b];
        const std::size_t d = algebra_.block_dim(b);
        return {b, local / d, local % d};
    }

    /// f_gamma e_alpha is either zero or a single module unit.
    std::optional<std::size_t> action_index(std::size_t gamma, std::size_t alpha) const {
        const auto x = basis(gamma);
        const auto a = algebra_.basis(alpha);
        if (x.block != a.block || x.col != a.row) return std::nullopt;
        return basis_index(x.block, x.row, a.col);
    }

    /// <f_gamma, f_delta> is either zero or a single algebra unit.
    std::optional<std::size_t> inner_index(std::size_t gamma, std::size_t delta) const {
        const auto x = basis(gamma);
        const auto y = basis(delta);
        if (x.block != y.block || x.row != y.row) return std::nullopt;
        return algebra_.basis_index(x.block, x.col, y.col);
    }

    friend bool operator==(const ModuleDescriptor&, const ModuleDescriptor&) = default;

private:
    AlgebraDescriptor algebra_;
    std::vector<std::size_t> mults_;
    std::vector<std::size_t> offsets_;
    std::size_t dim_ = 0;
};

class AlgebraElement {
public:
    explicit AlgebraElement(AlgebraDescriptor desc) : desc_(std::move(desc)) {
        for (std::size_t d : desc_.block_dims()) blocks_.push_back(CMatrix::Zero(d, d));
    }

    AlgebraElement(AlgebraDescriptor desc, std::vector<CMatrix> blocks)
        : desc_(std::move(desc)), blocks_(std::move(blocks)) {
        if (blocks_.size() != desc_.num_blocks())
            fail(ErrorKind::DescriptorMismatch, "wrong number of algebra blocks");
        for (std::size_t b = 0; b < blocks_.size(); ++b) {
            const auto d = static_cast<Eigen::Index>(desc_.block_dim(b));
            if (blocks_[b].rows() != d || blocks_[b].cols() != d)
                fail(ErrorKind::DescriptorMismatch, "algebra block " + std::to_string(b) +
                                                        " is not " + std::to_string(d) + "x" +
                                                        std::to_string(d));
        }
    }

    static AlgebraElement identity(const AlgebraDescriptor& desc) {
        AlgebraElement a(desc);
        for (auto& blk : a.blocks_) blk.setIdentity();
        return a;
    }

    static AlgebraElement unit(const AlgebraDescriptor& desc, std::size_t alpha) {
        AlgebraElement a(desc);
        a.coeff(alpha) = 1.0;
        return a;
    }

    const AlgebraDescriptor& descriptor() const { return desc_; }
    const std::vector<CMatrix>& blocks() const { return blocks_; }
    const CMatrix& block(std::size_t b) const { return blocks_.at(b); }
    CMatrix& block(std::size_t b) { return blocks_.at(b); }

    /// Coordinate along e_alpha.
    cplx coeff(std::size_t alpha) const {
        const auto [b, p, q] = desc_.basis(alpha);
        return blocks_[b](p, q);
    }
    cplx& coeff(std::size_t alpha) {
        const auto [b, p, q] = desc_.basis(alpha);
        return blocks_[b](p, q);
    }

    AlgebraElement operator+(const AlgebraElement& o) const {
        check_same(o);
        AlgebraElement r(*this);
        for (std::size_t b = 0; b < blocks_.size(); ++b) r.blocks_[b] += o.blocks_[b];
        return r;
    }
    AlgebraElement operator-(const AlgebraElement& o) const {
        check_same(o);
        AlgebraElement r(*this);
        for (std::size_t b = 0; b < blocks_.size(); ++b) r.blocks_[b] -= o.blocks_[b];
        return r;
    }
    friend AlgebraElement operator*(cplx s, AlgebraElement a) {
        for (auto& blk : a.blocks_) blk *= s;
        return a;
    }

    void check_same(const AlgebraElement& o) const {
        if (!(desc_ == o.desc_))
            fail(ErrorKind::DescriptorMismatch, "algebra elements over different algebras");
    }

private:
    AlgebraDescriptor desc_;
    std::vector<CMatrix> blocks_;
};

class ModuleElement {
public:
    explicit ModuleElement(ModuleDescriptor desc) : desc_(std::move(desc)) {
        for (std::size_t b = 0; b < desc_.mults().size(); ++b)
            blocks_.push_back(CMatrix::Zero(desc_.mult(b), desc_.algebra().block_dim(b)));
    }

    ModuleElement(ModuleDescriptor desc, std::vector<CMatrix> blocks)
        : desc_(std::move(desc)), blocks_(std::move(blocks)) {
        if (blocks_.size() != desc_.mults().size())
            fail(ErrorKind::DescriptorMismatch, "wrong number of module blocks");
        for (std::size_t b = 0; b < blocks_.size(); ++b) {
            if (blocks_[b].rows() != static_cast<Eigen::Index>(desc_.mult(b)) ||
                blocks_[b].cols() != static_cast<Eigen::Index>(desc_.algebra().block_dim(b)))
                fail(ErrorKind::DescriptorMismatch,
                     "module block " + std::to_string(b) + " has the wrong shape");
        }
    }

    static ModuleElement unit(const ModuleDescriptor& desc, std::size_t gamma) {
        ModuleElement x(desc);
        x.coeff(gamma) = 1.0;
        return x;
    }

    const ModuleDescriptor& descriptor() const { return desc_; }
    const std::vector<CMatrix>& blocks() const { return blocks_; }
    const CMatrix& block(std::size_t b) const { return blocks_.at(b); }
    CMatrix& block(std::size_t b) { return blocks_.at(b); }

    cplx coeff(std::size_t gamma) const {
        const auto [b, r, q] = desc_.basis(gamma);
        return blocks_[b](r, q);
    }
    cplx& coeff(std::size_t gamma) {
        const auto [b, r, q] = desc_.basis(gamma);
        return blocks_[b](r, q);
    }

    friend ModuleElement operator*(cplx s, ModuleElement x) {
        for (auto& blk : x.blocks_) blk *= s;
        return x;
    }

private:
    ModuleDescriptor desc_;
    std::vector<CMatrix> blocks_;
};

inline AlgebraElement alg_multiply(const AlgebraElement& a, const AlgebraElement& b) {
    a.check_same(b);
    std::vector<CMatrix> out;
    out.reserve(a.blocks().size());
    for (std::size_t k = 0; k < a.blocks().size(); ++k) out.push_back(a.block(k) * b.block(k));
    return AlgebraElement(a.descriptor(), std::move(out));
}

inline AlgebraElement alg_adjoint(const AlgebraElement& a) {
    std::vector<CMatrix> out;
    out.reserve(a.blocks().size());
    for (const auto& blk : a.blocks()) out.push_back(blk.adjoint());
    return AlgebraElement(a.descriptor(), std::move(out));
}

/// C*-norm: the largest singular value over all blocks.
inline double alg_norm(const AlgebraElement& a) {
    double n = 0.0;
    for (const auto& blk : a.blocks()) n = std::max(n, spectral_norm(blk));
    return n;
}

inline bool alg_is_positive(const AlgebraElement& a, double tol = 1e-9) {
    const double scale = std::max(alg_norm(a), 1.0);
    for (const auto& blk : a.blocks()) {
        if (frob(blk - blk.adjoint()) > tol * scale)
            fail(ErrorKind::NotHermitian, "algebra element is not self-adjoint");
    }
    for (const auto& blk : a.blocks()) {
        const CMatrix sym = (blk + blk.adjoint()) * 0.5;
        const auto e = hermitian_eig(sym);
        if (e.eigenvalues.size() > 0 && e.eigenvalues(e.eigenvalues.size() - 1) < -tol * scale)
            return false;
    }
    return true;
}

inline AlgebraElement mod_inner(const ModuleElement& x, const ModuleElement& y) {
    if (!(x.descriptor() == y.descriptor()))
        fail(ErrorKind::DescriptorMismatch, "inner product of elements of different modules");
    std::vector<CMatrix> out;
    for (std::size_t b = 0; b < x.blocks().size(); ++b) out.push_back(x.block(b).adjoint() * y.block(b));
    return AlgebraElement(x.descriptor().algebra(), std::move(out));
}

inline ModuleElement mod_action(const ModuleElement& x, const AlgebraElement& a) {
    if (!(x.descriptor().algebra() == a.descriptor()))
        fail(ErrorKind::DescriptorMismatch, "module and algebra element do not match");
    std::vector<CMatrix> out;
    for (std::size_t b = 0; b < x.blocks().size(); ++b) out.push_back(x.block(b) * a.block(b));
    return ModuleElement(x.descriptor(), std::move(out));
}

/// ||x|| = ||<x, x>||^{1/2}
inline double mod_norm(const ModuleElement& x) { return std::sqrt(alg_norm(mod_inner(x, x))); }

} // namespace stinespring
