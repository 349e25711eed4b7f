#include <catch_amalgamated.hpp>

#include "test_support.hpp"

using namespace stinespring;
using namespace testing_support;

namespace {

std::optional<Instance> instance_for(std::uint64_t seed) {
    Rng rng(seed * 131 + 3);
    auto pick = [&](std::size_t lo, std::size_t hi) { return std::uniform_int_distribution<std::size_t>(lo, hi)(rng); };
    InstanceSpec s;
    s.seed = seed;
    s.n = pick(1, 3);
    s.block_dims = {pick(1, 3), pick(1, 2)};
    s.mults = {pick(1, 2), pick(0, 1)};
    s.h1 = pick(1, 3);
    s.h2 = pick(2, 4);
    s.k1_extra = pick(0, 1);
    s.unital = pick(0, 1) == 1;
    try {
        return random_instance(s);
    } catch (const Error&) {
        return std::nullopt;
    }
}

ErrorKind kind_of(const std::function<void()>& f) {
    try {
        f();
    } catch (const Error& e) {
        return e.kind();
    }
    FAIL("no error raised");
    return ErrorKind::ParseError;
}

} // namespace

TEST_CASE("a dilation is equivalent to itself via identities", "[equiv]") {
    const auto inst = identity_instance(2);
    const auto d = dilate(inst);
    auto w = build_unitaries(inst, d, d);
    CHECK(verify_diagram(w, inst, d, d));
    CHECK(rel_residual(w.U1, identity(2)) <= 1e-12);
    CHECK(rel_residual(w.U2, identity(2)) <= 1e-12);
}

TEST_CASE("planted rotations are recovered", "[equiv][property]") {
    std::size_t count = 0;
    for (std::uint64_t seed = 1; count < 50; ++seed) {
        const auto inst = instance_for(seed);
        if (!inst) continue;
        ++count;
        const auto a = dilate(*inst);
        Rng rng(seed + 77);
        const CMatrix q1 = haar_unitary(rng, static_cast<Eigen::Index>(a.r1));
        const CMatrix q2 = haar_unitary(rng, static_cast<Eigen::Index>(a.r2));
        const auto b = rotate_dilation(a, q1, q2);
        REQUIRE(verify_dilation(*inst, b).pass);
        auto w = build_unitaries(*inst, a, b);
        CHECK(verify_diagram(w, *inst, a, b));
        CHECK(rel_residual(w.U1, q1) <= 1e-9);
        CHECK(rel_residual(w.U2, q2) <= 1e-9);

        // a basis-permuted re-dilation is equivalent as well
        DilateOptions o;
        o.basis_seed = seed;
        const auto c = dilate(*inst, o);
        auto wc = build_unitaries(*inst, a, c);
        CHECK(verify_diagram(wc, *inst, a, c));
    }
}

TEST_CASE("the identity is not a witness for a rotated copy", "[equiv]") {
    InstanceSpec s;
    s.seed = 2;
    s.n = 2;
    s.block_dims = {2, 1};
    s.mults = {1, 1};
    s.h1 = 2;
    s.h2 = 4;
    const auto inst = random_instance(s);
    const auto a = dilate(inst);
    REQUIRE(a.r1 >= 2);
    Rng rng(5);
    const auto b = rotate_dilation(a, haar_unitary(rng, static_cast<Eigen::Index>(a.r1)),
                                   haar_unitary(rng, static_cast<Eigen::Index>(a.r2)));
    EquivalenceWitness w;
    w.U1 = identity(static_cast<Eigen::Index>(a.r1));
    w.U2 = identity(static_cast<Eigen::Index>(a.r2));
    CHECK_FALSE(verify_diagram(w, inst, a, b));
}

TEST_CASE("equivalent dilations share the spectra of their spanning families", "[equiv]") {
    for (std::uint64_t seed = 1; seed <= 15; ++seed) {
        const auto inst = instance_for(seed);
        if (!inst) continue;
        const auto a = dilate(*inst);
        DilateOptions o;
        o.basis_seed = seed * 3;
        const auto b = dilate(*inst, o);
        // U1 unitary with U1 ca = cb forces equal singular values; compute them independently
        const Eigen::JacobiSVD<CMatrix> sa(k1_spanning_family(a)), sb(k1_spanning_family(b));
        CHECK((sa.singularValues() - sb.singularValues()).norm() <= 1e-9 * std::max(1.0, sa.singularValues().norm()));
        const Eigen::JacobiSVD<CMatrix> ta(k2_spanning_family(a)), tb(k2_spanning_family(b));
        CHECK((ta.singularValues() - tb.singularValues()).norm() <= 1e-9 * std::max(1.0, ta.singularValues().norm()));
    }
}

TEST_CASE("dilations of different instances are inconsistent", "[equiv]") {
    // same shapes, different seeds
    InstanceSpec s;
    s.n = 2;
    s.block_dims = {2};
    s.mults = {1};
    s.h1 = 2;
    s.h2 = 3;
    s.seed = 1;
    const auto i1 = random_instance(s);
    s.seed = 2;
    const auto i2 = random_instance(s);
    const auto a = dilate(i1);
    const auto b = dilate(i2);
    CHECK(kind_of([&] { (void)build_unitaries(i1, a, b); }) == ErrorKind::InconsistentSpans);
}

TEST_CASE("a non-minimal dilation is rejected", "[equiv]") {
    const auto inst = identity_instance(2);
    auto d = dilate(inst);
    // pad K1 with a dead direction
    auto pad = [](const CMatrix& m, Eigen::Index r, Eigen::Index c) {
        CMatrix out = CMatrix::Zero(r, c);
        out.topLeftCorner(m.rows(), m.cols()) = m;
        return out;
    };
    auto big = d;
    big.r1 = d.r1 + 1;
    for (auto& p : big.pi) p = pad(p, 3, 3);
    for (auto& s : big.S) s = pad(s, 3, 2);
    for (auto& p : big.psi) p = pad(p, 2, 3);
    CHECK(kind_of([&] { (void)build_unitaries(inst, d, big); }) == ErrorKind::NotMinimal);
}

TEST_CASE("rotate_dilation checks shapes", "[equiv]") {
    const auto d = dilate(identity_instance(2));
    CHECK_THROWS_AS(rotate_dilation(d, identity(3), identity(2)), Error);
}
