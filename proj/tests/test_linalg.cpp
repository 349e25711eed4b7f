#include <catch_amalgamated.hpp>

#include "test_support.hpp"

using namespace stinespring;
using namespace testing_support;
using Catch::Matchers::WithinAbs;

TEST_CASE("hermitian_eig on fixed matrices", "[linalg]") {
    const auto e = hermitian_eig(identity(2));
    CHECK_THAT(e.eigenvalues(0), WithinAbs(1.0, 1e-15));
    CHECK_THAT(e.eigenvalues(1), WithinAbs(1.0, 1e-15));
    CHECK(rel_residual(e.eigenvectors.adjoint() * e.eigenvectors, identity(2)) < 1e-14);

    CMatrix x(2, 2);
    x << 0, 1, 1, 0;
    const auto px = hermitian_eig(x);
    CHECK_THAT(px.eigenvalues(0), WithinAbs(1.0, 1e-15));
    CHECK_THAT(px.eigenvalues(1), WithinAbs(-1.0, 1e-15));
}

TEST_CASE("hermitian_eig reconstructs seeded Hermitian matrices", "[linalg]") {
    for (std::uint64_t seed = 1; seed <= 20; ++seed) {
        const CMatrix b = random_matrix(seed, 9, 9);
        const CMatrix m = b + b.adjoint();
        const auto e = hermitian_eig(m);
        for (Eigen::Index k = 1; k < e.eigenvalues.size(); ++k) CHECK(e.eigenvalues(k - 1) >= e.eigenvalues(k));
        const CMatrix rec = e.eigenvectors * e.eigenvalues.asDiagonal() * e.eigenvectors.adjoint();
        CHECK(frob(rec - m) / frob(m) <= 1e-12);
        CHECK(rel_residual(e.eigenvectors.adjoint() * e.eigenvectors, identity(9)) <= 1e-12);
    }
}

TEST_CASE("hermitian_eig spectra are invariant under unitary conjugation", "[linalg][property]") {
    for (std::uint64_t seed = 1; seed <= 25; ++seed) {
        const CMatrix b = random_matrix(seed, 6, 6);
        const CMatrix m = b + b.adjoint();
        Rng rng(seed + 1000);
        const CMatrix u = haar_unitary(rng, 6);
        const auto e1 = hermitian_eig(m);
        const auto e2 = hermitian_eig(u * m * u.adjoint(), 1e-10);
        CHECK((e1.eigenvalues - e2.eigenvalues).cwiseAbs().maxCoeff() <= 1e-10);
    }
}

TEST_CASE("hermitian_eig error paths", "[linalg]") {
    CMatrix rect(2, 3);
    rect.setZero();
    CHECK_THROWS_MATCHES(hermitian_eig(rect), Error,
                         Catch::Matchers::Predicate<Error>([](const Error& e) { return e.kind() == ErrorKind::NotSquare; }));
    CMatrix nh(2, 2);
    nh << 0, 1, 0, 0;
    CHECK_THROWS_MATCHES(hermitian_eig(nh), Error,
                         Catch::Matchers::Predicate<Error>([](const Error& e) { return e.kind() == ErrorKind::NotHermitian; }));
}

TEST_CASE("rank_truncate", "[linalg]") {
    SECTION("ones matrix has rank one") {
        const CMatrix g = CMatrix::Ones(2, 2);
        const auto rf = rank_truncate(hermitian_eig(g));
        REQUIRE(rf.rank == 1);
        // F = sqrt(2) * (1, 1)/sqrt(2) up to a phase
        CHECK_THAT(std::abs(rf.factor(0, 0)), WithinAbs(1.0, 1e-14));
        CHECK_THAT(std::abs(rf.factor(0, 1)), WithinAbs(1.0, 1e-14));
        CHECK(frob(rf.factor.adjoint() * rf.factor - g) <= 1e-14);
    }
    SECTION("identity keeps everything") { CHECK(rank_truncate(hermitian_eig(identity(3))).rank == 3); }
    SECTION("tiny eigenvalue is cut") {
        CMatrix g = CMatrix::Zero(2, 2);
        g(0, 0) = 1.0;
        g(1, 1) = 1e-14;
        CHECK(rank_truncate(hermitian_eig(g), 1e-10).rank == 1);
    }
    SECTION("indefinite input is rejected") {
        CMatrix g = CMatrix::Zero(2, 2);
        g(0, 0) = 1.0;
        g(1, 1) = -0.5;
        CHECK_THROWS_AS(rank_truncate(hermitian_eig(g)), Error);
    }
    SECTION("zero matrix has rank zero") {
        const auto rf = rank_truncate(hermitian_eig(CMatrix::Zero(3, 3)));
        CHECK(rf.rank == 0);
        CHECK(rf.factor.rows() == 0);
        CHECK(rf.factor.cols() == 3);
    }
}

TEST_CASE("rank_truncate factor reconstructs PSD inputs", "[linalg][property]") {
    for (std::uint64_t seed = 1; seed <= 30; ++seed) {
        const Eigen::Index n = 3 + static_cast<Eigen::Index>(seed % 5);
        const Eigen::Index k = 1 + static_cast<Eigen::Index>(seed % 3);
        const CMatrix b = random_matrix(seed, n, k);
        const CMatrix g = b * b.adjoint();
        const auto e = hermitian_eig(g);
        const auto rf = rank_truncate(e, 1e-10);
        CHECK(rf.rank == static_cast<std::size_t>(k));
        CHECK(frob(rf.factor.adjoint() * rf.factor - g) <= 10 * 1e-10 * e.eigenvalues(0));
    }
}

TEST_CASE("solve_lsq", "[linalg]") {
    SECTION("identity system") {
        const CMatrix b = random_matrix(3, 4, 2);
        const auto r = solve_lsq(identity(4), b);
        CHECK(frob(r.X - b) <= 1e-14);
        CHECK(r.residual <= 1e-15);
    }
    SECTION("overdetermined by hand") {
        CMatrix a(2, 1), b(2, 1);
        a << 1, 1;
        b << 1, 0;
        const auto r = solve_lsq(a, b);
        CHECK_THAT(r.X(0, 0).real(), WithinAbs(0.5, 1e-15));
        CHECK_THAT(r.X(0, 0).imag(), WithinAbs(0.0, 1e-15));
        // ||(0.5, 0.5) - (1, 0)||_F = sqrt(0.5), ||B||_F = 1
        CHECK_THAT(r.residual, WithinAbs(std::sqrt(0.5), 1e-15));
    }
    SECTION("rank deficient with consistent right-hand side") {
        for (std::uint64_t seed = 1; seed <= 10; ++seed) {
            const CMatrix a = random_matrix(seed, 6, 2) * random_matrix(seed + 50, 2, 4); // 6x4, rank 2
            const CMatrix x0 = random_matrix(seed + 100, 4, 3);
            const auto r = solve_lsq(a, a * x0);
            CHECK(r.residual <= 1e-12);
        }
    }
    SECTION("row mismatch") { CHECK_THROWS_AS(solve_lsq(identity(3), identity(2)), Error); }
}

TEST_CASE("svd_orthobasis", "[linalg]") {
    CHECK(svd_orthobasis(identity(2)).cols() == 2);

    CMatrix twin(3, 2);
    twin.col(0) << 1, 2, 3;
    twin.col(1) = twin.col(0);
    CHECK(svd_orthobasis(twin).cols() == 1);

    CHECK(svd_orthobasis(CMatrix::Zero(3, 4)).cols() == 0);

    for (std::uint64_t seed = 1; seed <= 10; ++seed) {
        const CMatrix m = random_matrix(seed, 4, 3) * random_matrix(seed + 7, 3, 7);
        const CMatrix q = svd_orthobasis(m);
        REQUIRE(q.cols() == 3);
        CHECK(rel_residual(q.adjoint() * q, identity(3)) <= 1e-12);
        CHECK(frob(q * q.adjoint() * m - m) / frob(m) <= 1e-12);
    }
}
