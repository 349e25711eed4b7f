#include <catch_amalgamated.hpp>

#include "test_support.hpp"

using namespace stinespring;
using namespace testing_support;

namespace {

InstanceSpec spec_for(std::uint64_t seed) {
    Rng rng(seed ^ 0xabcdef);
    auto pick = [&](std::size_t lo, std::size_t hi) { return std::uniform_int_distribution<std::size_t>(lo, hi)(rng); };
    InstanceSpec s;
    s.seed = seed;
    s.n = pick(1, 3);
    const std::size_t blocks = pick(1, 3);
    for (std::size_t b = 0; b < blocks; ++b) {
        if (b == 0) {
            s.block_dims = {pick(1, 3)};
            s.mults = {pick(1, 2)};
        } else {
            s.block_dims.push_back(pick(1, 3));
            s.mults.push_back(pick(0, 2));
        }
    }
    s.h1 = pick(1, 4);
    s.h2 = pick(1, 4);
    s.k1_extra = pick(0, 1);
    s.unital = pick(0, 3) != 0;
    return s;
}

} // namespace

TEST_CASE("scalar instances", "[random]") {
    for (std::uint64_t seed = 1; seed <= 20; ++seed) {
        InstanceSpec s;
        s.seed = seed;
        const auto inst = random_instance(s);
        CHECK(inst.algebra().dim() == 1);
        CHECK(is_completely_n_positive(inst.cp, 1e-10));
        CHECK(verify_compatibility(inst) <= 1e-10);
        CHECK(std::abs(inst.cp.at(0, 0, 0)(0, 0) - 1.0) <= 1e-12);
    }
}

TEST_CASE("generated instances are valid", "[random][property]") {
    std::size_t generated = 0, valid = 0;
    for (std::uint64_t seed = 1; generated < 1000; ++seed) {
        Instance inst;
        try {
            inst = random_instance(spec_for(seed));
        } catch (const Error& e) {
            REQUIRE(e.kind() == ErrorKind::DimensionTooSmall);
            continue;
        }
        ++generated;
        if (is_completely_n_positive(inst.cp, 1e-9) && verify_compatibility(inst) <= 1e-9) ++valid;
    }
    CHECK(valid == generated);
}

TEST_CASE("unital flag controls phi_ii(1)", "[random]") {
    for (std::uint64_t seed = 1; seed <= 30; ++seed) {
        auto s = spec_for(seed);
        s.unital = true;
        Instance inst;
        try {
            inst = random_instance(s);
        } catch (const Error&) {
            continue;
        }
        for (std::size_t i = 0; i < inst.n(); ++i)
            CHECK(frob(phi_of_identity(inst.cp, i) - identity(inst.h1())) <= 1e-12);
    }
    InstanceSpec s;
    s.seed = 5;
    s.n = 2;
    s.block_dims = {2};
    s.mults = {1};
    s.h1 = 2;
    s.h2 = 3;
    s.unital = false;
    const auto inst = random_instance(s);
    CHECK(frob(phi_of_identity(inst.cp, 0) - identity(2)) > 1e-3);
}

TEST_CASE("generation is bit-identical per seed", "[random]") {
    for (std::uint64_t seed = 1; seed <= 50; ++seed) {
        const auto s = spec_for(seed);
        try {
            const auto a = random_instance(s);
            const auto b = random_instance(s);
            CHECK(a == b);
        } catch (const Error&) {
        }
    }
    auto s = spec_for(3);
    const auto a = random_instance(s);
    s.seed += 1;
    try {
        CHECK_FALSE(a == random_instance(s));
    } catch (const Error&) {
    }
}

TEST_CASE("impossible dimensions are rejected", "[random]") {
    InstanceSpec s;
    s.h2 = 1;
    s.k2_extra = 1;
    CHECK_THROWS_AS(random_instance(s), Error);
}

TEST_CASE("Haar helpers produce unitaries and isometries", "[random]") {
    Rng rng(9);
    for (Eigen::Index n = 1; n <= 5; ++n) {
        const CMatrix u = haar_unitary(rng, n);
        CHECK(rel_residual(u.adjoint() * u, identity(n)) <= 1e-13);
        const CMatrix v = haar_isometry(rng, n + 2, n);
        CHECK(rel_residual(v.adjoint() * v, identity(n)) <= 1e-13);
    }
}
