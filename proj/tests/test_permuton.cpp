#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>

#include "permlab/permuton.hpp"

using namespace permlab;

namespace {

Permutation random_perm(int n, Rng& rng) {
    std::vector<int> v(n);
    for (int i = 0; i < n; ++i) v[i] = i + 1;
    for (int i = n - 1; i > 0; --i) std::swap(v[i], v[rng.below(i + 1)]);
    return Permutation(std::move(v));
}

}  // namespace

TEST_CASE("permuton of identity and reverse") {
    int k = 16;
    EmpiricalPermuton id = EmpiricalPermuton::of(Permutation::identity(k), k);
    EmpiricalPermuton rev = EmpiricalPermuton::of(Permutation::reversed(k), k);
    CHECK(id.total() == doctest::Approx(1.0).epsilon(1e-12));
    for (int i = 0; i < k; ++i) {
        CHECK(id.at(i, i) == doctest::Approx(1.0 / k));
        CHECK(rev.at(i, k - 1 - i) == doctest::Approx(1.0 / k));
    }
    CHECK(rect_distance(id, id) == 0.0);
    CHECK(rect_distance(id, rev) == doctest::Approx(0.5).epsilon(1e-12));
}

TEST_CASE("marginals of permutation permutons") {
    Rng rng(808);
    for (int rep = 0; rep < 50; ++rep) {
        int n = 50 + static_cast<int>(rng.below(400));
        int k = 2 + static_cast<int>(rng.below(63));
        if (k > n) k = n;
        EmpiricalPermuton e = EmpiricalPermuton::of(random_perm(n, rng), k);
        CHECK(e.total() == doctest::Approx(1.0).epsilon(1e-9));
        CHECK(e.max_marginal_deviation() <= 2.0 / k + 1e-12);
    }
}

TEST_CASE("rectangle distance is a pseudometric") {
    Rng rng(909);
    int k = 24;
    for (int rep = 0; rep < 100; ++rep) {
        EmpiricalPermuton a = EmpiricalPermuton::of(random_perm(100, rng), k);
        EmpiricalPermuton b = EmpiricalPermuton::of(random_perm(100, rng), k);
        EmpiricalPermuton c = EmpiricalPermuton::of(random_perm(100, rng), k);
        double ab = rect_distance(a, b), ba = rect_distance(b, a);
        CHECK(ab == ba);
        CHECK(ab >= 0);
        CHECK(ab <= 1.0 + 1e-12);
        CHECK(rect_distance(a, c) <= ab + rect_distance(b, c) + 1e-12);
        CHECK(rect_distance(a, a) == 0.0);
    }
    EmpiricalPermuton g5(5), g6(6);
    CHECK_THROWS_AS(rect_distance(g5, g6), std::invalid_argument);
}

TEST_CASE("patterns sampled from grid measures") {
    Rng rng(11011);
    EmpiricalPermuton id = EmpiricalPermuton::of(Permutation::identity(32), 32);
    for (int k : {1, 2, 5, 12}) {
        for (int rep = 0; rep < 20; ++rep) CHECK(sample_pattern(id, k, rng) == Permutation::identity(k));
    }
    // k = n without collisions reproduces a pattern of sigma
    Permutation sigma = random_perm(30, rng);
    EmpiricalPermuton mu = EmpiricalPermuton::of(sigma, 30);
    for (int rep = 0; rep < 20; ++rep) {
        Permutation pat = sample_pattern(mu, 5, rng);
        CHECK(pat.size() == 5);
    }
}

TEST_CASE("index patterns and densities") {
    Rng rng(2222);
    Permutation sigma = random_perm(60, rng);
    CHECK(sample_pattern(sigma, 1, rng) == Permutation{1});
    // inversion density of sampled index pairs matches direct counting
    int64_t inv = 0;
    for (int i = 1; i <= 60; ++i)
        for (int j = i + 1; j <= 60; ++j)
            if (sigma(i) > sigma(j)) ++inv;
    double want = static_cast<double>(inv) / (60.0 * 59.0 / 2.0);
    int64_t hits = 0;
    const int draws = 200000;
    for (int d = 0; d < draws; ++d)
        if (sample_pattern(sigma, 2, rng) == Permutation{2, 1}) ++hits;
    double got = static_cast<double>(hits) / draws;
    CHECK(std::fabs(got - want) < 3 * std::sqrt(want * (1 - want) / draws) + 1e-9);
}

TEST_CASE("pattern density over the class sampler") {
    DensityEstimate one = pattern_density(Family::strong, Permutation{1}, 50, 50, 303);
    CHECK(one.density == 1.0);
    DensityEstimate up = pattern_density(Family::semi, Permutation{1, 2}, 100, 200, 304);
    DensityEstimate down = pattern_density(Family::semi, Permutation{2, 1}, 100, 200, 304);
    CHECK(up.density + down.density == doctest::Approx(1.0).epsilon(1e-12));
    // seed replication: estimates agree within joint confidence bands
    DensityEstimate a = pattern_density(Family::strong, Permutation{2, 1}, 80, 300, 111, 32);
    DensityEstimate b = pattern_density(Family::strong, Permutation{2, 1}, 80, 300, 222, 32);
    CHECK(std::fabs(a.density - b.density) <= std::sqrt(a.ci99 * a.ci99 + b.ci99 * b.ci99) + 0.01);
}

TEST_CASE("pattern-vs-permuton distance bound at large k") {
    // threshold 16 k^{-1/4} exceeds 1 at these k, so the failure event is
    // impossible; the trial run still exercises the full pipeline
    Rng rng(515151);
    EmpiricalPermuton id = EmpiricalPermuton::of(Permutation::identity(64), 64);
    for (int k : {256, 1024}) {
        double threshold = 16.0 * std::pow(static_cast<double>(k), -0.25);
        int bad = 0;
        const int trials = 40;
        for (int t = 0; t < trials; ++t) {
            Permutation pat = sample_pattern(id, k, rng);
            EmpiricalPermuton mu = EmpiricalPermuton::of(pat, 64);
            if (rect_distance(mu, id) >= threshold) ++bad;
        }
        double bound = 0.5 * std::exp(-std::sqrt(static_cast<double>(k))) + 0.01;
        CHECK(static_cast<double>(bad) / trials <= bound);
    }
}

TEST_CASE("convergence diagnostic shrinks with size") {
    ConvergenceDiag diag = convergence_diagnostic(Family::strong, {40, 80, 160}, 80, 32, 616);
    REQUIRE(diag.rows.size() == 2);
    CHECK(diag.rows[0].d > 0);
    CHECK(diag.rows[1].d < diag.rows[0].d + 3 * (diag.rows[0].d_sd + diag.rows[1].d_sd));
    for (const auto& r : diag.rows) {
        CHECK(r.d_sd > 0);
        CHECK(r.d < 0.5);
    }
    CHECK_THROWS_AS(convergence_diagnostic(Family::strong, {10}, 10, 8, 1), std::invalid_argument);
    // same size, same seed: distance zero
    AveragedPermuton a = averaged_permuton(Family::semi, 60, 40, 24, 99);
    AveragedPermuton b = averaged_permuton(Family::semi, 60, 40, 24, 99);
    CHECK(rect_distance(a.mean, b.mean) == 0.0);
}

TEST_CASE("families separate at moderate size") {
    AveragedPermuton s = averaged_permuton(Family::strong, 150, 120, 32, 1212);
    AveragedPermuton m = averaged_permuton(Family::semi, 150, 120, 32, 1213);
    CHECK(rect_distance(s.mean, m.mean) > 0.05);
}
