#pragma once

// Seeded generation of valid instances by reverse construction: pick a
// representation pi~ = (+)_b (a_b (x) I_{m_b}) of A with its companion module
// representation Psi~(x) = (+)_b (x_b (x) I_{m_b}), isometries S~_i into the
// representation space and a common isometric embedding of K~2 into H2, then
// set
//
//     phi_ij(a) = S~_i^* pi~(a) S~_j,     Phi_i(x) = W~_i^* Psi~(x) S~_i.
//
// Such data satisfy the compatibility relation by construction.

#include <algorithm>
#include <cstdint>
#include <numeric>
#include <random>
#include <string>
#include <vector>

#include "algebra.hpp"
#include "cp_map.hpp"
#include "errors.hpp"
#include "linalg.hpp"

namespace stinespring {

using Rng = std::mt19937_64;

inline CMatrix gaussian_matrix(Rng& rng, Eigen::Index rows, Eigen::Index cols) {
    std::normal_distribution<double> normal(0.0, 1.0);
    CMatrix m(rows, cols);
    // fill column-major explicitly so the stream order is fixed
    for (Eigen::Index c = 0; c < cols; ++c)
        for (Eigen::Index r = 0; r < rows; ++r) {
            const double re = normal(rng);
            const double im = normal(rng);
            m(r, c) = cplx(re, im);
        }
    return m;
}

/// Haar-distributed unitary: QR of a complex Gaussian matrix with the phases
/// of R's diagonal pushed into Q.
inline CMatrix haar_unitary(Rng& rng, Eigen::Index n) {
    if (n == 0) return CMatrix(0, 0);
    const CMatrix z = gaussian_matrix(rng, n, n);
    Eigen::HouseholderQR<CMatrix> qr(z);
    CMatrix q = qr.householderQ();
    const CMatrix r = qr.matrixQR().triangularView<Eigen::Upper>();
    for (Eigen::Index k = 0; k < n; ++k) {
        const cplx d = r(k, k);
        const double mag = std::abs(d);
        q.col(k) *= mag > 0.0 ? d / mag : cplx(1.0);
    }
    return q;
}

/// First `cols` columns of a Haar unitary: a random isometry C^cols -> C^rows.
inline CMatrix haar_isometry(Rng& rng, Eigen::Index rows, Eigen::Index cols) {
    return haar_unitary(rng, rows).leftCols(cols);
}

struct InstanceSpec {
    std::uint64_t seed = 0;
    std::size_t n = 1;
    std::vector<std::size_t> block_dims{1};
    std::vector<std::size_t> mults{1};
    std::size_t h1 = 1;
    std::size_t h2 = 1;
    std::size_t k1_extra = 0; // additional dimension of K~1 beyond h1
    std::size_t k2_extra = 0; // additional, unreachable dimension of K~2
    bool unital = true;       // phi_ii(1) = I
};

namespace detail {

/// Multiplicities m_b with sum d_b m_b >= target that keep sum k_b m_b small:
/// fill the cheapest blocks (lowest k_b / d_b) first, then sprinkle random
/// extra copies while the K~2 budget allows.
inline std::vector<std::size_t> choose_multiplicities(Rng& rng, const AlgebraDescriptor& alg,
                                                      const std::vector<std::size_t>& mults,
                                                      std::size_t target, std::size_t k2_budget) {
    const std::size_t nb = alg.num_blocks();
    std::vector<std::size_t> order(nb);
    std::iota(order.begin(), order.end(), 0);
    std::stable_sort(order.begin(), order.end(), [&](std::size_t a, std::size_t b) {
        // k_a / d_a < k_b / d_b
        return mults[a] * alg.block_dim(b) < mults[b] * alg.block_dim(a);
    });

    std::vector<std::size_t> m(nb, 0);
    std::size_t k1 = 0, k2 = 0;
    // always at least one copy so K~1 is nonzero
    while (k1 < std::max<std::size_t>(target, 1)) {
        const std::size_t b = order.front();
        ++m[b];
        k1 += alg.block_dim(b);
        k2 += mults[b];
    }
    // make sure the module representation is not identically zero
    if (k2 == 0) {
        std::optional<std::size_t> best;
        for (std::size_t b : order)
            if (mults[b] > 0 && (!best || mults[b] < mults[*best])) best = b;
        if (best && mults[*best] <= k2_budget) {
            ++m[*best];
            k2 += mults[*best];
        }
    }
    std::bernoulli_distribution coin(0.5);
    for (std::size_t b = 0; b < nb; ++b) {
        if (coin(rng) && k2 + mults[b] <= k2_budget) {
            ++m[b];
            k2 += mults[b];
        }
    }
    if (k2 > k2_budget)
        fail(ErrorKind::DimensionTooSmall,
             "H2 of dimension " + std::to_string(k2_budget) + " (after k2_extra) cannot hold the " +
                 std::to_string(k2) + "-dimensional range of the module representation");
    return m;
}

/// pi~(e_alpha) for the amplified representation with multiplicities m.
inline CMatrix amplified_unit(const AlgebraDescriptor& alg, const std::vector<std::size_t>& m,
                              std::size_t alpha) {
    std::size_t dim = 0;
    for (std::size_t b = 0; b < alg.num_blocks(); ++b) dim += alg.block_dim(b) * m[b];
    CMatrix out = CMatrix::Zero(dim, dim);
    const auto [blk, p, q] = alg.basis(alpha);
    std::size_t off = 0;
    for (std::size_t b = 0; b < blk; ++b) off += alg.block_dim(b) * m[b];
    const std::size_t mb = m[blk];
    for (std::size_t c = 0; c < mb; ++c) out(off + p * mb + c, off + q * mb + c) = 1.0;
    return out;
}

/// Psi~(f_gamma) for the amplified module representation with multiplicities m.
inline CMatrix amplified_module_unit(const ModuleDescriptor& mod, const std::vector<std::size_t>& m,
                                     std::size_t gamma) {
    const auto& alg = mod.algebra();
    std::size_t rows = 0, cols = 0;
    for (std::size_t b = 0; b < alg.num_blocks(); ++b) {
        rows += mod.mult(b) * m[b];
        cols += alg.block_dim(b) * m[b];
    }
    CMatrix out = CMatrix::Zero(rows, cols);
    const auto [blk, r, q] = mod.basis(gamma);
    std::size_t roff = 0, coff = 0;
    for (std::size_t b = 0; b < blk; ++b) {
        roff += mod.mult(b) * m[b];
        coff += alg.block_dim(b) * m[b];
    }
    const std::size_t mb = m[blk];
    for (std::size_t c = 0; c < mb; ++c) out(roff + r * mb + c, coff + q * mb + c) = 1.0;
    return out;
}

} // namespace detail

inline Instance random_instance(const InstanceSpec& spec) {
    if (spec.n == 0 || spec.h1 == 0 || spec.h2 == 0)
        fail(ErrorKind::DimensionTooSmall, "n, h1 and h2 must be positive");
    const AlgebraDescriptor alg(spec.block_dims);
    const ModuleDescriptor mod(alg, spec.mults);
    check_raw_dim(spec.n, alg.dim(), spec.h1);
    if (spec.k2_extra >= spec.h2)
        fail(ErrorKind::DimensionTooSmall, "k2_extra must be smaller than h2");

    Rng rng(spec.seed);
    const auto m = detail::choose_multiplicities(rng, alg, spec.mults, spec.h1 + spec.k1_extra,
                                                 spec.h2 - spec.k2_extra);
    std::size_t k1 = 0, k2 = 0;
    for (std::size_t b = 0; b < alg.num_blocks(); ++b) {
        k1 += alg.block_dim(b) * m[b];
        k2 += spec.mults[b] * m[b];
    }
    const auto h1 = static_cast<Eigen::Index>(spec.h1);
    const auto h2 = static_cast<Eigen::Index>(spec.h2);

    std::vector<CMatrix> S;
    std::uniform_real_distribution<double> scale(0.3, 1.7);
    for (std::size_t i = 0; i < spec.n; ++i) {
        CMatrix s = haar_isometry(rng, static_cast<Eigen::Index>(k1), h1);
        if (!spec.unital) {
            RVector d(h1);
            for (Eigen::Index c = 0; c < h1; ++c) d(c) = scale(rng);
            s = s * d.asDiagonal() * haar_unitary(rng, h1);
        }
        S.push_back(std::move(s));
    }

    // K~2 = range part (k2) + unreachable part (k2_extra). The range part is
    // embedded by the same isometry for every i; the extra columns may differ.
    const CMatrix u2 = haar_unitary(rng, h2);
    const CMatrix j_range = u2.leftCols(static_cast<Eigen::Index>(k2));
    std::vector<CMatrix> W_adj;
    for (std::size_t i = 0; i < spec.n; ++i) {
        CMatrix w(h2, static_cast<Eigen::Index>(k2 + spec.k2_extra));
        w.leftCols(static_cast<Eigen::Index>(k2)) = j_range;
        if (spec.k2_extra > 0) {
            const auto rest = static_cast<Eigen::Index>(spec.h2 - k2);
            const CMatrix mix = haar_isometry(rng, rest, static_cast<Eigen::Index>(spec.k2_extra));
            w.rightCols(static_cast<Eigen::Index>(spec.k2_extra)) = u2.rightCols(rest) * mix;
        }
        W_adj.push_back(std::move(w));
    }

    std::vector<CMatrix> phi(spec.n * spec.n * alg.dim());
    for (std::size_t alpha = 0; alpha < alg.dim(); ++alpha) {
        const CMatrix pa = detail::amplified_unit(alg, m, alpha);
        for (std::size_t i = 0; i < spec.n; ++i)
            for (std::size_t j = 0; j < spec.n; ++j)
                phi[(i * spec.n + j) * alg.dim() + alpha] = S[i].adjoint() * pa * S[j];
    }

    std::vector<CMatrix> Phi(spec.n * mod.dim());
    for (std::size_t gamma = 0; gamma < mod.dim(); ++gamma) {
        const CMatrix psi = detail::amplified_module_unit(mod, m, gamma);
        CMatrix psi_ext = CMatrix::Zero(static_cast<Eigen::Index>(k2 + spec.k2_extra), psi.cols());
        psi_ext.topRows(static_cast<Eigen::Index>(k2)) = psi;
        for (std::size_t i = 0; i < spec.n; ++i)
            Phi[i * mod.dim() + gamma] = W_adj[i] * psi_ext * S[i];
    }

    Provenance prov;
    prov.seed = spec.seed;
    prov.meta["generator"] = "random_instance";
    prov.meta["k1_extra"] = std::to_string(spec.k1_extra);
    prov.meta["k2_extra"] = std::to_string(spec.k2_extra);
    prov.meta["unital"] = spec.unital ? "true" : "false";

    return Instance(CPBlockMap(spec.n, alg, spec.h1, std::move(phi)),
                    ModuleCPTuple(spec.n, mod, spec.h1, spec.h2, std::move(Phi)), std::move(prov));
}

} // namespace stinespring
