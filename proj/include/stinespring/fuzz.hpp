#pragma once

// Seeded end-to-end property harness. Each trial draws dimensions, generates an
// instance, dilates it, verifies it, re-dilates in a permuted raw basis,
// checks the two are unitarily equivalent, and finally recovers a planted
// rotation of the first dilation.

#include <cstdint>
#include <map>
#include <random>
#include <string>
#include <utility>
#include <vector>

#include "dilation.hpp"
#include "equivalence.hpp"
#include "errors.hpp"
#include "random_instance.hpp"

namespace stinespring {

struct FuzzOptions {
    std::size_t trials = 100;
    std::uint64_t seed = 42;
    std::size_t max_n = 3;
    std::size_t max_block = 3; // bound on both the number of blocks and each block size
    std::size_t max_h = 4;
    double tol = kDefaultTol;
    double cutoff = kDefaultCutoff;
};

struct TrialRecord {
    std::size_t index = 0;
    std::uint64_t seed = 0;
    InstanceSpec spec;
    std::size_t r1 = 0, r2 = 0;
    bool pass = false;
    std::string failure; // empty when pass
};

struct FuzzReport {
    FuzzOptions options;
    std::vector<TrialRecord> trials;
    std::map<std::string, double> worst;
    std::map<std::pair<std::size_t, std::size_t>, std::size_t> histogram; // (r1, r2) -> count

    std::size_t passed() const {
        std::size_t k = 0;
        for (const auto& t : trials) k += t.pass ? 1 : 0;
        return k;
    }
    bool pass() const { return passed() == trials.size(); }
};

inline std::uint64_t splitmix64(std::uint64_t x) {
    x += 0x9e3779b97f4a7c15ULL;
    x = (x ^ (x >> 30)) * 0xbf58476d1ce4e5b9ULL;
    x = (x ^ (x >> 27)) * 0x94d049bb133111ebULL;
    return x ^ (x >> 31);
}

namespace detail {

inline std::size_t draw(Rng& rng, std::size_t lo, std::size_t hi) {
    return std::uniform_int_distribution<std::size_t>(lo, hi)(rng);
}

/// Draw dimensions until the generator accepts them; the draws only depend on
/// the trial seed, so the outcome is reproducible.
inline std::pair<InstanceSpec, Instance> draw_instance(std::uint64_t trial_seed, const FuzzOptions& o) {
    Rng rng(trial_seed);
    for (int attempt = 0; attempt < 256; ++attempt) {
        InstanceSpec s;
        s.seed = splitmix64(trial_seed ^ static_cast<std::uint64_t>(attempt));
        s.n = draw(rng, 1, o.max_n);
        const std::size_t blocks = draw(rng, 1, o.max_block);
        s.block_dims.clear();
        s.mults.clear();
        for (std::size_t b = 0; b < blocks; ++b) {
            s.block_dims.push_back(draw(rng, 1, o.max_block));
            s.mults.push_back(draw(rng, 0, 2));
        }
        if (std::all_of(s.mults.begin(), s.mults.end(), [](std::size_t k) { return k == 0; }))
            s.mults[draw(rng, 0, blocks - 1)] = 1;
        s.h1 = draw(rng, 1, o.max_h);
        s.h2 = draw(rng, 1, o.max_h);
        s.k1_extra = draw(rng, 0, 1);
        s.k2_extra = 0;
        s.unital = draw(rng, 0, 3) != 0;
        try {
            return {s, random_instance(s)};
        } catch (const Error& e) {
            if (e.kind() != ErrorKind::DimensionTooSmall && e.kind() != ErrorKind::DimensionTooLarge) throw;
        }
    }
    fail(ErrorKind::DimensionTooSmall, "no admissible dimensions within the fuzz bounds");
}

inline void note(std::map<std::string, double>& worst, const std::string& key, double value) {
    auto [it, inserted] = worst.emplace(key, value);
    if (!inserted) it->second = std::max(it->second, value);
}

} // namespace detail

inline TrialRecord run_trial(std::size_t index, const FuzzOptions& o, std::map<std::string, double>& worst) {
    TrialRecord t;
    t.index = index;
    t.seed = splitmix64(o.seed + index);
    try {
        auto [spec, inst] = detail::draw_instance(t.seed, o);
        t.spec = spec;

        DilateOptions d1;
        d1.cutoff = o.cutoff;
        d1.tol = o.tol;
        const auto a = dilate(inst, d1);
        t.r1 = a.r1;
        t.r2 = a.r2;
        const auto rep = verify_dilation(inst, a, o.tol);
        for (const auto& [name, value] : rep.gated()) detail::note(worst, name, value);
        if (rep.all_unital) detail::note(worst, "s_isometry_squared", rep.worst_isometry_squared());
        if (!rep.pass) {
            t.failure = "verify";
            return t;
        }

        DilateOptions d2 = d1;
        d2.basis_seed = splitmix64(t.seed ^ 0x5151);
        const auto b = dilate(inst, d2);
        const auto rep_b = verify_dilation(inst, b, o.tol);
        if (!rep_b.pass) {
            t.failure = "verify-permuted";
            return t;
        }
        auto w = build_unitaries(inst, a, b, o.tol);
        const bool ok_b = verify_diagram(w, inst, a, b, o.tol);
        for (const auto& [name, value] : w.diagram()) detail::note(worst, name, value);
        if (!ok_b) {
            t.failure = "equiv-permuted";
            return t;
        }

        Rng rot(splitmix64(t.seed ^ 0xa0a0));
        const CMatrix q1 = haar_unitary(rot, static_cast<Eigen::Index>(a.r1));
        const CMatrix q2 = haar_unitary(rot, static_cast<Eigen::Index>(a.r2));
        const auto c = rotate_dilation(a, q1, q2);
        auto wc = build_unitaries(inst, a, c, o.tol);
        const bool ok_c = verify_diagram(wc, inst, a, c, o.tol);
        const double recovery = std::max(rel_residual(wc.U1, q1), rel_residual(wc.U2, q2));
        detail::note(worst, "rotation_recovery", recovery);
        for (const auto& [name, value] : wc.diagram()) detail::note(worst, name, value);
        if (!ok_c || recovery > o.tol) {
            t.failure = "equiv-rotated";
            return t;
        }
        t.pass = true;
    } catch (const Error& e) {
        t.failure = std::string(to_string(e.kind()));
    }
    return t;
}

inline FuzzReport run_fuzz(const FuzzOptions& o) {
    FuzzReport rep;
    rep.options = o;
    for (std::size_t k = 0; k < o.trials; ++k) {
        rep.trials.push_back(run_trial(k, o, rep.worst));
        const auto& t = rep.trials.back();
        ++rep.histogram[{t.r1, t.r2}];
    }
    return rep;
}

} // namespace stinespring
