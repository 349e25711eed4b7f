#pragma once

// Helpers and brute-force oracles shared by the test suites. The oracles work
// from explicit dense matrices and triple loops and never call into the
// dilation engine they are used to check.

#include <complex>
#include <cstdint>
#include <random>
#include <vector>

#include "stinespring/stinespring.hpp"

namespace testing_support {

using namespace stinespring;

inline CMatrix random_matrix(std::uint64_t seed, Eigen::Index rows, Eigen::Index cols) {
    Rng rng(seed);
    return gaussian_matrix(rng, rows, cols);
}

inline AlgebraElement random_algebra_element(std::uint64_t seed, const AlgebraDescriptor& desc) {
    Rng rng(seed);
    std::vector<CMatrix> blocks;
    for (std::size_t d : desc.block_dims())
        blocks.push_back(gaussian_matrix(rng, static_cast<Eigen::Index>(d), static_cast<Eigen::Index>(d)));
    return AlgebraElement(desc, std::move(blocks));
}

inline ModuleElement random_module_element(std::uint64_t seed, const ModuleDescriptor& desc) {
    Rng rng(seed);
    std::vector<CMatrix> blocks;
    for (std::size_t b = 0; b < desc.mults().size(); ++b)
        blocks.push_back(gaussian_matrix(rng, static_cast<Eigen::Index>(desc.mult(b)),
                                         static_cast<Eigen::Index>(desc.algebra().block_dim(b))));
    return ModuleElement(desc, std::move(blocks));
}

/// Entrywise triple-loop product.
inline CMatrix naive_product(const CMatrix& a, const CMatrix& b) {
    CMatrix out = CMatrix::Zero(a.rows(), b.cols());
    for (Eigen::Index i = 0; i < a.rows(); ++i)
        for (Eigen::Index j = 0; j < b.cols(); ++j) {
            std::complex<double> s = 0.0;
            for (Eigen::Index k = 0; k < a.cols(); ++k) s += a(i, k) * b(k, j);
            out(i, j) = s;
        }
    return out;
}

/// phi_ij applied to an arbitrary element by expanding it over the matrix units
/// block by block (independent of AlgebraElement::coeff).
inline CMatrix expand_phi(const CPBlockMap& cp, std::size_t i, std::size_t j, const AlgebraElement& a) {
    CMatrix out = CMatrix::Zero(cp.h1(), cp.h1());
    std::size_t alpha = 0;
    for (std::size_t b = 0; b < a.blocks().size(); ++b) {
        const CMatrix& blk = a.block(b);
        for (Eigen::Index p = 0; p < blk.rows(); ++p)
            for (Eigen::Index q = 0; q < blk.cols(); ++q, ++alpha) out += blk(p, q) * cp.at(i, j, alpha);
    }
    return out;
}

/// Gram matrix of <.,.>_0 by the defining double sum: for every pair of raw
/// coordinates build e_alpha^* e_beta as a full algebra element, multiply it
/// out, and apply phi_ij by basis expansion.
inline CMatrix brute_force_gram(const CPBlockMap& cp) {
    const auto& alg = cp.algebra();
    const std::size_t n = cp.n(), da = alg.dim(), h = cp.h1();
    const auto N = static_cast<Eigen::Index>(n * da * h);
    CMatrix g(N, N);
    for (std::size_t i = 0; i < n; ++i)
        for (std::size_t a = 0; a < da; ++a)
            for (std::size_t j = 0; j < n; ++j)
                for (std::size_t b = 0; b < da; ++b) {
                    const AlgebraElement ea = AlgebraElement::unit(alg, a);
                    const AlgebraElement eb = AlgebraElement::unit(alg, b);
                    std::vector<CMatrix> blocks;
                    for (std::size_t k = 0; k < alg.num_blocks(); ++k)
                        blocks.push_back(naive_product(ea.block(k).adjoint(), eb.block(k)));
                    const CMatrix val = expand_phi(cp, i, j, AlgebraElement(alg, std::move(blocks)));
                    for (std::size_t s = 0; s < h; ++s)
                        for (std::size_t t = 0; t < h; ++t)
                            g(static_cast<Eigen::Index>((i * da + a) * h + s),
                              static_cast<Eigen::Index>((j * da + b) * h + t)) = val(s, t);
                }
    return g;
}

/// Rank by counting eigenvalues of a Hermitian PSD matrix above rel * lambda_max,
/// using Eigen's solver directly.
inline std::size_t oracle_rank(const CMatrix& g, double rel = 1e-10) {
    Eigen::SelfAdjointEigenSolver<CMatrix> es(g);
    const auto& ev = es.eigenvalues();
    const double top = ev.maxCoeff();
    std::size_t r = 0;
    for (Eigen::Index k = 0; k < ev.size(); ++k) r += ev(k) > rel * top ? 1 : 0;
    return r;
}

/// phi = id on M_d (n = 1, h1 = d), Phi = id on V = M_d (h2 = d).
inline Instance identity_instance(std::size_t d) {
    const AlgebraDescriptor alg({d});
    const ModuleDescriptor mod(alg, {d});
    std::vector<CMatrix> phi, Phi;
    for (std::size_t a = 0; a < alg.dim(); ++a) phi.push_back(AlgebraElement::unit(alg, a).block(0));
    for (std::size_t g = 0; g < mod.dim(); ++g) Phi.push_back(ModuleElement::unit(mod, g).block(0));
    return Instance(CPBlockMap(1, alg, d, std::move(phi)), ModuleCPTuple(1, mod, d, d, std::move(Phi)));
}

/// n = 1, A = V = C, h1 = h2 = 1, phi = Phi = id.
inline Instance scalar_instance() { return identity_instance(1); }

/// Transpose map on M_2 as a single-slot family (h1 = 2).
inline CPBlockMap transpose_map() {
    const AlgebraDescriptor alg({2});
    std::vector<CMatrix> phi;
    for (std::size_t a = 0; a < alg.dim(); ++a) phi.push_back(AlgebraElement::unit(alg, a).block(0).transpose());
    return CPBlockMap(1, alg, 2, std::move(phi));
}

/// phi_ij(a) = c_ij a on A = C with h1 = 1.
inline CPBlockMap scalar_family(const std::vector<std::vector<double>>& c) {
    const AlgebraDescriptor alg({1});
    std::vector<CMatrix> phi;
    for (const auto& row : c)
        for (double v : row) phi.push_back(CMatrix::Constant(1, 1, v));
    return CPBlockMap(c.size(), alg, 1, std::move(phi));
}

} // namespace testing_support
