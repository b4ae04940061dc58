#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <map>
#include <set>

#include "permlab/coalescent.hpp"
#include "permlab/stats.hpp"

using namespace permlab;

namespace {

Permutation cp_naive(const CoalescentProcess& p) {
    int n = p.size();
    std::vector<int> vals(n);
    for (int j = 1; j <= n; ++j) {
        int c = 1;
        for (int i = 1; i < j; ++i)
            if (p.value(i, j) < 0) ++c;
        for (int i = j + 1; i <= n; ++i)
            if (p.value(j, i) >= 0) ++c;
        vals[j - 1] = c;
    }
    return Permutation(std::move(vals));
}

Walk random_free_walk(Family f, int n, uint64_t seed) {
    StepDistribution mu(f, false);
    Rng rng(seed);
    Walk w{{0, 0}};
    for (int i = 1; i < n; ++i) {
        Pt d = mu.sample(rng);
        w.push_back({w.back().x + d.x, w.back().y + d.y});
    }
    return w;
}

std::map<int, int64_t> fv_map(const FinalValues& fv) {
    std::map<int, int64_t> m;
    for (auto& [v, c] : fv.values) m[v] = c;
    return m;
}

}  // namespace

TEST_CASE("single-step pinned examples") {
    Walk up{{0, 0}, {0, 1}};
    Walk right{{0, 0}, {1, 0}};
    CHECK(wcp_strong(up).trajectory(1) == std::vector<int>{0, 1});
    CHECK(wcp_strong(right).trajectory(1) == std::vector<int>{0, -1});
    CHECK(wcp_semi(up).trajectory(1) == std::vector<int>{0, 1});
    CHECK(wcp_semi(right).trajectory(1) == std::vector<int>{0, -1});
    CHECK(wcp_strong(Walk{{0, 0}}).trajectory(1) == std::vector<int>{0});
    CHECK_THROWS_AS(wcp_strong(Walk{{0, 0}, {1, 1}}), std::invalid_argument);
}

TEST_CASE("the two update definitions agree on random states") {
    Rng rng(99);
    StepDistribution mus(Family::strong, false), mum(Family::semi, false);
    for (int i = 0; i < 1000000; ++i) {
        int z = static_cast<int>(rng.below(61)) - 30;
        CHECK_NOTHROW(trajectory_step_checked(Family::strong, z, mus.sample(rng)));
        CHECK_NOTHROW(trajectory_step_checked(Family::semi, z, mum.sample(rng)));
    }
}

TEST_CASE("induced permutation on pinned examples") {
    CHECK(cp(wcp_strong(Walk{{0, 0}})) == Permutation{1});
    CHECK(cp(wcp_strong(Walk{{0, 0}, {0, 1}})) == Permutation{2, 1});
    CHECK(cp(wcp_strong(Walk{{0, 0}, {1, 0}})) == Permutation{1, 2});
    CHECK(cp(wcp_semi(Walk{{0, 0}, {0, 1}})) == Permutation{2, 1});
    CHECK(cp(wcp_semi(Walk{{0, 0}, {1, 0}})) == Permutation{1, 2});
}

TEST_CASE("merged-front extraction equals the direct formula") {
    for (Family f : {Family::strong, Family::semi}) {
        ExactSampler s(f, 60);
        Rng rng(7777);
        for (int rep = 0; rep < 40; ++rep) {
            CoalescentProcess p(s.sample(rng), f);
            CHECK(cp(p) == cp_naive(p));
        }
        // unconditioned driving walks exercise deep-negative states
        for (int rep = 0; rep < 40; ++rep) {
            CoalescentProcess p(random_free_walk(f, 60, 1000 + rep), f);
            CHECK(cp(p) == cp_naive(p));
        }
    }
}

TEST_CASE("lazy mode matches materialized mode") {
    for (Family f : {Family::strong, Family::semi}) {
        Walk w = random_free_walk(f, 80, 31337);
        CoalescentProcess mat(w, f, /*materialize_threshold=*/2000);
        CoalescentProcess lazy(w, f, /*materialize_threshold=*/0);
        CHECK(mat.materialized());
        CHECK_FALSE(lazy.materialized());
        for (int t = 1; t <= 80; t += 7) CHECK(mat.trajectory(t) == lazy.trajectory(t));
        for (int s = 1; s <= 80; s += 11) CHECK(mat.column(s) == lazy.column(s));
        CHECK(cp(mat) == cp(lazy));
    }
}

TEST_CASE("order relation is a total order consistent with the permutation") {
    for (Family f : {Family::strong, Family::semi}) {
        ExactSampler s(f, 50);
        Rng rng(2468);
        for (int rep = 0; rep < 5; ++rep) {
            CoalescentProcess p(s.sample(rng), f);
            Permutation sigma = cp(p);
            int n = p.size();
            for (int i = 1; i <= n; ++i) CHECK(order_relation(p, i, i) == Cmp::equal);
            for (int i = 1; i <= n; ++i) {
                for (int j = 1; j <= n; ++j) {
                    if (i == j) continue;
                    Cmp c = order_relation(p, i, j);
                    CHECK(c != Cmp::equal);
                    CHECK(order_relation(p, j, i) == (c == Cmp::less ? Cmp::greater : Cmp::less));
                    CHECK((c == Cmp::less) == (sigma(i) < sigma(j)));
                }
            }
            // transitivity over all triples
            for (int i = 1; i <= n; ++i)
                for (int j = 1; j <= n; ++j)
                    for (int k = 1; k <= n; ++k) {
                        if (order_relation(p, i, j) == Cmp::less && order_relation(p, j, k) == Cmp::less)
                            CHECK(order_relation(p, i, k) == Cmp::less);
                    }
        }
    }
}

TEST_CASE("pattern extraction from trajectory signs") {
    for (Family f : {Family::strong, Family::semi}) {
        ExactSampler s(f, 40);
        Rng rng(13579);
        CoalescentProcess p0(s.sample(rng), f);
        CHECK(pattern_from_subset(p0, {5}) == Permutation{1});
        for (int rep = 0; rep < 500; ++rep) {
            CoalescentProcess p(s.sample(rng), f);
            Permutation sigma = cp(p);
            std::set<int> pick;
            int k = 1 + static_cast<int>(rng.below(6));
            while (static_cast<int>(pick.size()) < k) pick.insert(1 + static_cast<int>(rng.below(40)));
            std::vector<int> I(pick.begin(), pick.end());
            CHECK(pattern_from_subset(p, I) == pattern_at(sigma, I));
            // pair case: descent iff the earlier trajectory is non-negative later
            int a = I[0], b = I.back();
            if (a < b) {
                Permutation pr = pattern_from_subset(p, {a, b});
                CHECK((pr == Permutation{2, 1}) == (p.value(a, b) >= 0));
            }
        }
    }
}

TEST_CASE("final values: basic shapes") {
    auto fv1 = final_values(wcp_strong(Walk{{0, 0}}));
    CHECK(fv1.values == std::vector<std::pair<int, int64_t>>{{0, 1}});
    // exhaustive: final values fill the interval given by the last label
    for (Family f : {Family::strong, Family::semi}) {
        for (int n = 1; n <= 7; ++n) {
            for_each_walk(f, n, [&](const Walk& w) {
                FinalValues fv = final_values(CoalescentProcess(w, f, 0));
                CHECK(fv.is_interval());
                CHECK(fv.min_value() == -w.back().x);
                CHECK(fv.max_value() == w.back().y);
                CHECK(fv.total() == n);
            });
        }
    }
}

// The worked 11-step example: profiles published for the final steps pin the
// multiplicity transitions. Any length-8 prefix reaching (4,1) with the stated
// profile must reproduce the stated profiles after the steps (-2,0), (0,1),
// (1,-2).
TEST_CASE("strong multiplicity transitions of the worked example") {
    const std::map<int, int64_t> want8{{-4, 2}, {-3, 1}, {-2, 2}, {-1, 1}, {0, 1}, {1, 1}};
    const std::map<int, int64_t> want9{{-2, 2}, {-1, 1}, {0, 5}, {1, 1}};
    const std::map<int, int64_t> want10{{-2, 2}, {-1, 1}, {0, 1}, {1, 5}, {2, 1}};
    const std::map<int, int64_t> want11{{-3, 2}, {-2, 1}, {-1, 7}, {0, 1}};
    int matches = 0;
    for_each_walk(Family::strong, 8, [&](const Walk& w) {
        if (w.back() != Pt{4, 1}) return;
        if (fv_map(final_values(CoalescentProcess(w, Family::strong, 0))) != want8) return;
        ++matches;
        Walk ext = w;
        ext.push_back({2, 1});
        CHECK(fv_map(final_values(CoalescentProcess(ext, Family::strong, 0))) == want9);
        ext.push_back({2, 2});
        CHECK(fv_map(final_values(CoalescentProcess(ext, Family::strong, 0))) == want10);
        ext.push_back({3, 0});
        CHECK(fv_map(final_values(CoalescentProcess(ext, Family::strong, 0))) == want11);
        CHECK(check_commute(ext, Family::strong));
    });
    CHECK(matches > 0);
}

TEST_CASE("semi multiplicity transitions of the worked example") {
    const std::map<int, int64_t> want7{{-3, 1}, {-2, 1}, {-1, 1}, {0, 1}, {1, 3}};
    const std::map<int, int64_t> want8{{-1, 1}, {0, 1}, {1, 3}, {2, 3}};
    const std::map<int, int64_t> want9{{-4, 1}, {-3, 1}, {-2, 3}, {-1, 3}, {0, 1}};
    int matches = 0;
    for_each_walk(Family::semi, 7, [&](const Walk& w) {
        if (w.back() != Pt{3, 1}) return;
        if (fv_map(final_values(CoalescentProcess(w, Family::semi, 0))) != want7) return;
        ++matches;
        Walk ext = w;
        ext.push_back({1, 2});
        CHECK(fv_map(final_values(CoalescentProcess(ext, Family::semi, 0))) == want8);
        ext.push_back({4, 0});
        CHECK(fv_map(final_values(CoalescentProcess(ext, Family::semi, 0))) == want9);
        CHECK(check_commute(ext, Family::semi));
    });
    CHECK(matches > 0);
}

TEST_CASE("commuting diagram, exhaustive small sizes") {
    for (Family f : {Family::strong, Family::semi}) {
        for (int n = 1; n <= 7; ++n) {
            for_each_walk(f, n, [&](const Walk& w) { CHECK(check_commute(w, f)); });
        }
    }
}

TEST_CASE("commuting diagram on sampled size-50 walks") {
    for (Family f : {Family::strong, Family::semi}) {
        ExactSampler s(f, 50);
        Rng rng(4242);
        uint64_t bad = 0;
        for (int rep = 0; rep < 10000; ++rep)
            if (!check_commute(s.sample(rng), f)) ++bad;
        CHECK(bad == 0);
    }
}

TEST_CASE("active-site lemma, exhaustive small sizes") {
    CHECK(check_active_site_lemma(Walk{{0, 0}}, Family::strong));
    for (Family f : {Family::strong, Family::semi}) {
        for (int n = 1; n <= 6; ++n) {
            for_each_walk(f, n, [&](const Walk& w) { CHECK(check_active_site_lemma(w, f)); });
        }
    }
}

TEST_CASE("coalescent point levels") {
    CHECK(coalescent_point_levels(wcp_strong(Walk{{0, 0}})).empty());
    for (int rep = 0; rep < 20; ++rep) {
        auto ls = coalescent_point_levels(
            CoalescentProcess(random_free_walk(Family::strong, 500, 80 + rep), Family::strong, 0));
        for (auto& [level, cnt] : ls) {
            CHECK((level == 0 || level == -1));
            CHECK(cnt > 0);
        }
        auto lm = coalescent_point_levels(
            CoalescentProcess(random_free_walk(Family::semi, 500, 80 + rep), Family::semi, 0));
        for (auto& [level, cnt] : lm) CHECK(level == 1);
    }
    // pair counts add up to all coalesced pairs: at the end every pair of
    // trajectories with equal final value has coalesced
    for (Family f : {Family::strong, Family::semi}) {
        Walk w = random_free_walk(f, 200, 5);
        CoalescentProcess p(w, f, 0);
        auto fv = final_values(p);
        uint64_t want = 0;
        for (auto& [v, m] : fv.values) want += static_cast<uint64_t>(m) * (m - 1) / 2;
        uint64_t got = 0;
        for (auto& [lvl, c] : coalescent_point_levels(p)) got += c;
        CHECK(got == want);
    }
}

TEST_CASE("excursion structure of trajectories") {
    for (int rep = 0; rep < 30; ++rep) {
        Walk ws = random_free_walk(Family::strong, 600, 300 + rep);
        CoalescentProcess ps(ws, Family::strong, 0);
        for (int t = 1; t <= 600; t += 37) {
            auto tr = ps.trajectory(t);
            for (size_t i = 1; i < tr.size(); ++i) {
                if (tr[i] > 0 && tr[i - 1] <= 0) {
                    CHECK(tr[i - 1] == 0);  // enters the positive side through 0
                    CHECK(tr[i] == 1);      // and the positive excursion opens at 1
                }
                if (tr[i] <= 0 && tr[i - 1] > 0) CHECK(tr[i] == -1);  // leaves through -1
            }
        }
        Walk wm = random_free_walk(Family::semi, 600, 900 + rep);
        CoalescentProcess pm(wm, Family::semi, 0);
        for (int t = 1; t <= 600; t += 37) {
            auto tr = pm.trajectory(t);
            for (size_t i = 1; i < tr.size(); ++i) {
                CHECK(tr[i] != 0);  // never returns to 0 after opening
                if (tr[i] > 0 && tr[i - 1] < 0) CHECK(tr[i] == 1);
            }
        }
    }
}

TEST_CASE("monotone coupling of trajectory pairs") {
    Rng rng(112233);
    for (Family f : {Family::strong, Family::semi}) {
        for (int rep = 0; rep < 25; ++rep) {
            Walk w = random_free_walk(f, 500, 7000 + rep);
            CoalescentProcess p(w, f, 0);
            for (int pair = 0; pair < 20; ++pair) {
                int t = 1 + static_cast<int>(rng.below(499));
                int u = t + 1 + static_cast<int>(rng.below(500 - t));
                auto a = p.trajectory(t);
                auto b = p.trajectory(u);
                for (int k = u; k < 500; ++k) {
                    int d0 = a[k - t] - b[k - u];
                    int d1 = a[k + 1 - t] - b[k + 1 - u];
                    if (d0 > 0) CHECK(d1 >= 0);
                    if (d0 < 0) CHECK(d1 <= 0);
                    if (d0 == 0) CHECK(d1 == 0);  // coalescence is permanent
                }
            }
        }
    }
}
