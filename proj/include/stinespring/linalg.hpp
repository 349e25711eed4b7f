#pragma once

// Dense complex linear algebra used by every other part of the library.
// Everything is a thin, deterministic layer over Eigen's dense solvers.

#include <algorithm>
#include <cmath>
#include <complex>
#include <cstddef>
#include <string>
#include <vector>

#include <Eigen/Dense>

#include "errors.hpp"

namespace stinespring {

using cplx = std::complex<double>;
using CMatrix = Eigen::MatrixXcd;
using RVector = Eigen::VectorXd;

/// Default relative cutoff for eigenvalues of Gram-type matrices.
inline constexpr double kDefaultCutoff = 1e-10;

inline double frob(const CMatrix& m) { return m.size() == 0 ? 0.0 : m.norm(); }

/// ||m - ref||_F / max(||ref||_F, 1)
inline double rel_residual(const CMatrix& m, const CMatrix& ref) {
    if (m.rows() != ref.rows() || m.cols() != ref.cols())
        fail(ErrorKind::ShapeMismatch, "residual between " + std::to_string(m.rows()) + "x" +
                                           std::to_string(m.cols()) + " and " +
                                           std::to_string(ref.rows()) + "x" +
                                           std::to_string(ref.cols()));
    return frob(m - ref) / std::max(frob(ref), 1.0);
}

inline bool all_finite(const CMatrix& m) {
    for (Eigen::Index k = 0; k < m.size(); ++k) {
        const cplx z = m.data()[k];
        if (!std::isfinite(z.real()) || !std::isfinite(z.imag())) return false;
    }
    return true;
}

/// Largest singular value; zero for empty matrices.
inline double spectral_norm(const CMatrix& m) {
    if (m.size() == 0) return 0.0;
    Eigen::JacobiSVD<CMatrix> svd(m);
    return svd.singularValues()(0);
}

/// Eigenvalues sorted descending, eigenvectors in matching columns.
struct HermEig {
    RVector eigenvalues;
    CMatrix eigenvectors;
};

inline HermEig hermitian_eig(const CMatrix& m, double tol_herm = 1e-12) {
    if (m.rows() != m.cols())
        fail(ErrorKind::NotSquare, std::to_string(m.rows()) + "x" + std::to_string(m.cols()));
    const Eigen::Index n = m.rows();
    if (n == 0) return {RVector(0), CMatrix(0, 0)};

    const double defect = frob(m - m.adjoint());
    if (defect > tol_herm * frob(m))
        fail(ErrorKind::NotHermitian, "symmetry defect " + std::to_string(defect));

    const CMatrix sym = (m + m.adjoint()) * 0.5;
    Eigen::SelfAdjointEigenSolver<CMatrix> solver(sym);

    // Eigen returns ascending order.
    HermEig out{RVector(n), CMatrix(n, n)};
    for (Eigen::Index k = 0; k < n; ++k) {
        out.eigenvalues(k) = solver.eigenvalues()(n - 1 - k);
        out.eigenvectors.col(k) = solver.eigenvectors().col(n - 1 - k);
    }
    return out;
}

/// Quotient factor of a PSD matrix: factor = diag(sqrt(kept)) * kept_vectors^*.
struct RankFactor {
    std::size_t rank = 0;
    CMatrix factor;       // rank x N
    RVector kept;         // kept eigenvalues, descending
    CMatrix kept_vectors; // N x rank
};

inline RankFactor rank_truncate(const HermEig& e, double rel_cutoff = kDefaultCutoff) {
    const Eigen::Index n = e.eigenvalues.size();
    RankFactor out;
    out.factor = CMatrix(0, e.eigenvectors.rows());
    out.kept = RVector(0);
    out.kept_vectors = CMatrix(e.eigenvectors.rows(), 0);
    if (n == 0) return out;

    const double lmax = e.eigenvalues(0);
    const double lmin = e.eigenvalues(n - 1);
    if (lmin < -rel_cutoff * std::max(lmax, 1.0))
        fail(ErrorKind::NotPSD, "eigenvalue " + std::to_string(lmin) + " below -" +
                                    std::to_string(rel_cutoff) + " * max(lambda_max, 1)");
    if (lmax <= 0.0) return out;

    const double threshold = rel_cutoff * lmax;
    Eigen::Index rank = 0;
    while (rank < n && e.eigenvalues(rank) > threshold) ++rank;

    out.rank = static_cast<std::size_t>(rank);
    out.kept = e.eigenvalues.head(rank);
    out.kept_vectors = e.eigenvectors.leftCols(rank);
    out.factor = out.kept.cwiseSqrt().asDiagonal() * out.kept_vectors.adjoint();
    return out;
}

struct LsqResult {
    CMatrix X;
    double residual = 0.0; // ||A X - B||_F / max(||B||_F, 1)
};

/// Minimum-norm least-squares solution of A X = B.
inline LsqResult solve_lsq(const CMatrix& A, const CMatrix& B) {
    if (A.rows() != B.rows())
        fail(ErrorKind::ShapeMismatch, "solve_lsq: A has " + std::to_string(A.rows()) +
                                           " rows, B has " + std::to_string(B.rows()));
    LsqResult out;
    if (A.cols() == 0 || A.rows() == 0) {
        out.X = CMatrix::Zero(A.cols(), B.cols());
    } else {
        Eigen::CompleteOrthogonalDecomposition<CMatrix> cod(A);
        out.X = cod.solve(B);
    }
    out.residual = rel_residual(A * out.X, B);
    return out;
}

/// Orthonormal basis (as columns) of the column space of `columns`, keeping
/// singular values above rel_cutoff * sigma_max.
inline CMatrix svd_orthobasis(const CMatrix& columns, double rel_cutoff = kDefaultCutoff) {
    if (columns.rows() == 0 || columns.cols() == 0) return CMatrix(columns.rows(), 0);
    Eigen::BDCSVD<CMatrix> svd(columns, Eigen::ComputeThinU);
    const RVector& s = svd.singularValues();
    if (s.size() == 0 || s(0) <= 0.0) return CMatrix(columns.rows(), 0);
    Eigen::Index rank = 0;
    while (rank < s.size() && s(rank) > rel_cutoff * s(0)) ++rank;
    return svd.matrixU().leftCols(rank);
}

/// Numerical rank at a relative singular-value cutoff.
inline std::size_t numerical_rank(const CMatrix& m, double rel_cutoff = kDefaultCutoff) {
    return static_cast<std::size_t>(svd_orthobasis(m, rel_cutoff).cols());
}

inline CMatrix identity(Eigen::Index n) { return CMatrix::Identity(n, n); }

inline CMatrix kron(const CMatrix& a, const CMatrix& b) {
    CMatrix out(a.rows() * b.rows(), a.cols() * b.cols());
    for (Eigen::Index i = 0; i < a.rows(); ++i)
        for (Eigen::Index j = 0; j < a.cols(); ++j)
            out.block(i * b.rows(), j * b.cols(), b.rows(), b.cols()) = a(i, j) * b;
    return out;
}

} // namespace stinespring
