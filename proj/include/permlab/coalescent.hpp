#pragma once

#include <cstdint>
#include <functional>
#include <map>
#include <stdexcept>
#include <vector>

#include "permlab/gentree.hpp"
#include "permlab/permutation.hpp"
#include "permlab/walks.hpp"

namespace permlab {

// ---------------------------------------------------------------------------
// One-step trajectory updates
// ---------------------------------------------------------------------------

// Strong family, case form. Positive trajectories crossing into the
// non-positive half clamp at -1; negative trajectories crossing up clamp at 0.
inline int step_strong_cases(int z, Pt inc) {
    if (inc.x == 1) {  // (1, -i), i >= 0
        int i = -inc.y;
        if (z > 0) return z - i > 0 ? z - i : -1;
        return z - 1;
    }
    if (inc.x == 0) return z >= 0 ? z + 1 : z;  // (0, 1)
    int i = -inc.x;                             // (-i, 0), i >= 1
    if (z >= 0) return z;
    return z + i < 0 ? z + i : 0;
}

// Strong family, reformulated in terms of the marginal increments.
inline int step_strong_reform(int z, Pt inc) {
    int dx = inc.x, dy = inc.y;
    if ((z == 0 && z - dx >= 0) || (z > 0 && z + dy > 0)) return z + dy;
    if (z > 0 && z + dy <= 0) return -1;
    if (z <= 0 && z - dx < 0) return z - dx;
    return 0;
}

// Semi family, case form. Negative trajectories crossing up jump to 1.
inline int step_semi_cases(int z, Pt inc) {
    if (inc.x >= 1) {  // (i, 1-i), i >= 1
        int i = inc.x;
        if (z >= 0 && z - i + 1 > 0) return z - i + 1;
        return z - i;
    }
    int i = -inc.x;  // (-i, 1), i >= 0
    if (z < 0 && z + i < 0) return z + i;
    if (z < 0) return 1;
    return z + 1;
}

inline int step_semi_reform(int z, Pt inc) {
    int dx = inc.x, dy = inc.y;
    if (z >= 0 && z + dy > 0) return z + dy;
    if ((z >= 0 && z + dy <= 0) || (z < 0 && z - dx < 0)) return z - dx;
    return 1;
}

inline int trajectory_step(Family f, int z, Pt inc) {
    return f == Family::strong ? step_strong_cases(z, inc) : step_semi_cases(z, inc);
}

// Evaluates both stated forms and insists they agree.
inline int trajectory_step_checked(Family f, int z, Pt inc) {
    int a = trajectory_step(f, z, inc);
    int b = f == Family::strong ? step_strong_reform(z, inc) : step_semi_reform(z, inc);
    if (a != b) throw std::logic_error("coalescent step: the two update definitions disagree");
    return a;
}

// ---------------------------------------------------------------------------
// Coalescent-walk processes
// ---------------------------------------------------------------------------

// Triangular family of trajectories driven by a walk. The full triangle is
// materialized for small sizes; above the threshold values are recomputed per
// request, which keeps the permutation extraction near-linear in memory.
class CoalescentProcess {
public:
    CoalescentProcess(Walk w, Family f, int materialize_threshold = 2000)
        : walk_(std::move(w)), family_(f) {
        if (walk_.empty()) throw std::invalid_argument("coalescent process: empty walk");
        for (size_t i = 1; i < walk_.size(); ++i)
            if (!increment_allowed({walk_[i].x - walk_[i - 1].x, walk_[i].y - walk_[i - 1].y}, f))
                throw std::invalid_argument("coalescent process: increment " + std::to_string(i) +
                                            " is not in the family's step set");
        if (size() <= materialize_threshold) {
            tri_.resize(size());
            for (int t = 1; t <= size(); ++t) tri_[t - 1] = compute_trajectory(t);
        }
    }

    int size() const { return static_cast<int>(walk_.size()); }
    Family family() const { return family_; }
    const Walk& walk() const { return walk_; }
    bool materialized() const { return !tri_.empty(); }

    // Z^{(t)}_s for 1 <= t <= s <= n.
    int value(int t, int s) const {
        check_range(t, s);
        if (materialized()) return tri_[t - 1][s - t];
        std::vector<int> tr = compute_trajectory(t);
        return tr[s - t];
    }

    // Values Z^{(t)}_s for s = t..n.
    std::vector<int> trajectory(int t) const {
        check_range(t, t);
        if (materialized()) return tri_[t - 1];
        return compute_trajectory(t);
    }

    // Values Z^{(i)}_s for i = 1..s.
    std::vector<int> column(int s) const;

private:
    void check_range(int t, int s) const {
        if (t < 1 || s < t || s > size()) throw std::out_of_range("coalescent process: bad (t,s)");
    }

    std::vector<int> compute_trajectory(int t) const {
        std::vector<int> out;
        out.reserve(size() - t + 1);
        int z = 0;
        out.push_back(z);
        for (int s = t + 1; s <= size(); ++s) {
            Pt inc{walk_[s - 1].x - walk_[s - 2].x, walk_[s - 1].y - walk_[s - 2].y};
            z = trajectory_step_checked(family_, z, inc);
            out.push_back(z);
        }
        return out;
    }

    Walk walk_;
    Family family_;
    std::vector<std::vector<int>> tri_;
};

inline CoalescentProcess wcp(const Walk& w, Family f, int materialize_threshold = 2000) {
    return CoalescentProcess(w, f, materialize_threshold);
}

inline CoalescentProcess wcp_strong(const Walk& w) { return wcp(w, Family::strong); }
inline CoalescentProcess wcp_semi(const Walk& w) { return wcp(w, Family::semi); }

// ---------------------------------------------------------------------------
// Joint evolution with coalescence merging
// ---------------------------------------------------------------------------

struct MergeEvent {
    int time;
    int level;        // trajectory value where the classes met
    uint64_t pairs;   // number of (t,t') pairs coalescing at this event
};

struct FrontResult {
    Permutation sigma;
    std::vector<std::pair<int, int64_t>> final_values;  // sorted (value, multiplicity)
    std::vector<MergeEvent> merges;
    std::vector<int> end_value;  // end_value[t-1] = final value of the trajectory opened at t
};

// Evolves all trajectories at once. Classes of equal value are permanent (the
// update depends only on the current value and is monotone), so the front
// holds one entry per distinct value. The per-start counts needed for the
// induced permutation are accumulated on a merge forest and resolved at the
// end. on_time, when given, sees the sorted (value, multiplicity) list after
// every time step.
inline FrontResult evolve_front(
    const Walk& w, Family f,
    const std::function<void(int, const std::vector<std::pair<int, int64_t>>&)>& on_time = nullptr) {
    struct Node {
        int parent = -1;
        int64_t pos_add = 0;
    };
    struct Entry {
        int value;
        int node;
        int64_t cnt;
    };
    int n = static_cast<int>(w.size());
    std::vector<Node> nodes;
    std::vector<int> leaf(n + 1, -1);
    std::vector<int64_t> neg_lt(n + 1, 0);  // strictly negative mass when each index opens
    std::vector<Entry> front, next;
    std::vector<char> fresh;
    std::vector<MergeEvent> merges;

    auto snapshot = [&](int s) {
        if (!on_time) return;
        std::vector<std::pair<int, int64_t>> fv;
        fv.reserve(front.size());
        for (const auto& e : front) fv.emplace_back(e.value, e.cnt);
        on_time(s, fv);
    };

    nodes.push_back({});
    leaf[1] = 0;
    front.push_back({0, 0, 1});
    neg_lt[1] = 0;
    snapshot(1);

    for (int s = 2; s <= n; ++s) {
        Pt inc{w[s - 1].x - w[s - 2].x, w[s - 1].y - w[s - 2].y};
        next.clear();
        fresh.clear();
        for (const auto& e : front) {
            int nv = trajectory_step_checked(f, e.value, inc);
            if (!next.empty() && next.back().value == nv) {
                Entry& b = next.back();
                if (!fresh.back()) {
                    nodes.push_back({});
                    int p = static_cast<int>(nodes.size()) - 1;
                    nodes[b.node].parent = p;
                    b.node = p;
                    fresh.back() = 1;
                    merges.push_back({s, nv, 0});
                }
                nodes[e.node].parent = b.node;
                merges.back().pairs += static_cast<uint64_t>(b.cnt) * static_cast<uint64_t>(e.cnt);
                b.cnt += e.cnt;
            } else {
                next.push_back({nv, e.node, e.cnt});
                fresh.push_back(0);
            }
        }
        front.swap(next);

        for (const auto& e : front)
            if (e.value >= 0) nodes[e.node].pos_add += 1;

        // new trajectory opens at 0
        nodes.push_back({});
        int lf = static_cast<int>(nodes.size()) - 1;
        leaf[s] = lf;
        size_t pos = 0;
        while (pos < front.size() && front[pos].value < 0) ++pos;
        if (pos < front.size() && front[pos].value == 0) {
            Entry& b = front[pos];
            nodes.push_back({});
            int p = static_cast<int>(nodes.size()) - 1;
            nodes[b.node].parent = p;
            nodes[lf].parent = p;
            merges.push_back({s, 0, static_cast<uint64_t>(b.cnt)});
            b.node = p;
            b.cnt += 1;
        } else {
            front.insert(front.begin() + pos, Entry{0, lf, 1});
        }

        int64_t acc = 0;
        for (const auto& e : front) {
            if (e.value >= 0) break;
            acc += e.cnt;
        }
        neg_lt[s] = acc;
        snapshot(s);
    }

    std::vector<int64_t> total(nodes.size(), 0);
    for (size_t i = nodes.size(); i-- > 0;)
        total[i] = nodes[i].pos_add + (nodes[i].parent >= 0 ? total[nodes[i].parent] : 0);

    std::vector<int> vals(n);
    for (int j = 1; j <= n; ++j) vals[j - 1] = static_cast<int>(neg_lt[j] + 1 + total[leaf[j]]);

    FrontResult r{Permutation(std::move(vals)), {}, std::move(merges), {}};
    r.final_values.reserve(front.size());
    for (const auto& e : front) r.final_values.emplace_back(e.value, e.cnt);

    // resolve each start's class value through the merge forest
    std::vector<int> root_value(nodes.size(), 0);
    std::vector<char> is_root(nodes.size(), 0);
    for (const auto& e : front) {
        is_root[e.node] = 1;
        root_value[e.node] = e.value;
    }
    std::vector<int> up(nodes.size());
    for (size_t i = 0; i < nodes.size(); ++i) up[i] = nodes[i].parent;
    std::function<int(int)> find = [&](int v) -> int {
        if (up[v] < 0) return v;
        return up[v] = find(up[v]);
    };
    r.end_value.resize(n);
    for (int t = 1; t <= n; ++t) r.end_value[t - 1] = root_value[find(leaf[t])];
    return r;
}

inline std::vector<int> CoalescentProcess::column(int s) const {
    check_range(s, s);
    if (materialized()) {
        std::vector<int> out(s);
        for (int i = 1; i <= s; ++i) out[i - 1] = tri_[i - 1][s - i];
        return out;
    }
    Walk prefix(walk_.begin(), walk_.begin() + s);
    return evolve_front(prefix, family_).end_value;
}

// ---------------------------------------------------------------------------
// The induced permutation and its relatives
// ---------------------------------------------------------------------------

// sigma(j) = #{i < j : Z^{(i)}_j < 0} + 1 + #{i > j : Z^{(j)}_i >= 0}.
// A zero value at the later index means the two trajectories have already
// coalesced there; the later index then sorts first. (Processes whose
// trajectories never return to zero cannot tell the difference, but the
// strong-family ones can, and only this convention matches the tree
// bijection and the active-site identity.)
inline Permutation cp(const CoalescentProcess& p) { return evolve_front(p.walk(), p.family()).sigma; }

enum class Cmp { less, equal, greater };

// Total order induced by the process: the earlier index sorts first exactly
// when its trajectory is strictly negative at the later index.
inline Cmp order_relation(const CoalescentProcess& p, int i, int j) {
    if (i == j) return Cmp::equal;
    if (i < j) return p.value(i, j) < 0 ? Cmp::less : Cmp::greater;
    return p.value(j, i) < 0 ? Cmp::greater : Cmp::less;
}

// Pattern induced on a set of start indices; only the pairwise trajectory
// signs are consulted, so it needs |I| trajectories, not the permutation.
inline Permutation pattern_from_subset(const CoalescentProcess& p, std::vector<int> I) {
    if (I.empty()) throw std::invalid_argument("pattern_from_subset: empty index set");
    std::sort(I.begin(), I.end());
    for (size_t a = 0; a + 1 < I.size(); ++a)
        if (I[a] == I[a + 1]) throw std::invalid_argument("pattern_from_subset: repeated index");
    int k = static_cast<int>(I.size());
    std::vector<std::vector<int>> traj(k);
    for (int a = 0; a < k; ++a) traj[a] = p.trajectory(I[a]);
    std::vector<int> rank(k, 1);
    for (int a = 0; a < k; ++a) {
        for (int b = a + 1; b < k; ++b) {
            int z = traj[a][I[b] - I[a]];
            if (z < 0)
                rank[b] += 1;  // I[a] sorts before I[b]
            else
                rank[a] += 1;  // z >= 0: the later index sorts first
        }
    }
    return Permutation(std::move(rank));
}

struct FinalValues {
    std::vector<std::pair<int, int64_t>> values;  // sorted (value, multiplicity)

    int64_t total() const {
        int64_t s = 0;
        for (auto& [v, m] : values) s += m;
        return s;
    }
    // true when the value set is exactly the integer interval [-x, y] with 0 inside
    bool is_interval() const {
        for (size_t i = 0; i + 1 < values.size(); ++i)
            if (values[i + 1].first != values[i].first + 1) return false;
        return !values.empty() && values.front().first <= 0 && values.back().first >= 0;
    }
    int min_value() const { return values.front().first; }
    int max_value() const { return values.back().first; }
    int64_t mult(int v) const {
        for (auto& [val, m] : values)
            if (val == v) return m;
        return 0;
    }
};

inline FinalValues final_values(const CoalescentProcess& p) {
    return FinalValues{evolve_front(p.walk(), p.family()).final_values};
}

// Multiset of trajectory values at which classes met, keyed by value.
inline std::map<int, uint64_t> coalescent_point_levels(const CoalescentProcess& p) {
    std::map<int, uint64_t> out;
    for (const auto& ev : evolve_front(p.walk(), p.family()).merges) out[ev.level] += ev.pairs;
    return out;
}

// ---------------------------------------------------------------------------
// Cross-checks between the tree bijection and the coalescent route
// ---------------------------------------------------------------------------

// The inverse tree bijection and the coalescent route give the same member.
inline bool check_commute(const Walk& w, Family f) {
    return walk_to_perm(w, f) == cp(CoalescentProcess(w, f, /*materialize_threshold=*/0));
}

// The identity at the walk's final time only: final values form the interval
// [-x, y] given by the last label, and the oracle-computed active sites
// satisfy s_l = 1 + sum of multiplicities below l. Exhaustive sweeps call
// this once per tree node, which covers every prefix of every walk.
inline bool check_active_sites_at_end(const Walk& w, Family f) {
    const PermClass& cls = PermClass::of(f);
    Permutation pi = walk_to_perm(w, f);
    std::vector<int> sites = active_sites(pi, cls);
    FinalValues fv = final_values(CoalescentProcess(w, f, /*materialize_threshold=*/0));
    int x = w.back().x, y = w.back().y;
    if (static_cast<int>(sites.size()) != x + y + 2) return false;
    if (static_cast<int>(fv.values.size()) != x + y + 1) return false;
    for (size_t i = 0; i < fv.values.size(); ++i)
        if (fv.values[i].first != -x + static_cast<int>(i)) return false;
    int64_t below = 0;
    for (int idx = 0; idx < static_cast<int>(sites.size()); ++idx) {
        if (sites[idx] != 1 + below) return false;
        if (idx < static_cast<int>(fv.values.size())) below += fv.values[idx].second;
    }
    return true;
}

// For every prefix: final values form the interval [-x, y] given by the label,
// and the oracle-computed active sites satisfy
// s_l = 1 + sum of multiplicities below l.
inline bool check_active_site_lemma(const Walk& w, Family f) {
    const PermClass& cls = PermClass::of(f);
    int n = static_cast<int>(w.size());
    bool ok = true;
    std::vector<std::vector<std::pair<int, int64_t>>> fv_at(n + 1);
    evolve_front(w, f, [&](int s, const std::vector<std::pair<int, int64_t>>& fv) { fv_at[s] = fv; });
    for (int m = 1; m <= n && ok; ++m) {
        Walk prefix(w.begin(), w.begin() + m);
        Permutation pi = walk_to_perm(prefix, f);
        std::vector<int> sites = active_sites(pi, cls);
        const auto& fv = fv_at[m];
        int x = w[m - 1].x, y = w[m - 1].y;
        if (static_cast<int>(sites.size()) != x + y + 2) ok = false;
        if (static_cast<int>(fv.size()) != x + y + 1) ok = false;
        for (size_t i = 0; ok && i < fv.size(); ++i)
            if (fv[i].first != -x + static_cast<int>(i)) ok = false;
        if (!ok) break;
        // sites[idx] corresponds to l = idx - x, expected 1 + sum_{j<l} mult
        int64_t below = 0;
        for (int idx = 0; idx < static_cast<int>(sites.size()); ++idx) {
            if (sites[idx] != 1 + below) {
                ok = false;
                break;
            }
            if (idx < static_cast<int>(fv.size())) below += fv[idx].second;
        }
    }
    return ok;
}

}  // namespace permlab
