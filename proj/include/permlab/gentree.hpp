#pragma once

#include <cstdint>
#include <functional>
#include <map>
#include <memory>
#include <mutex>
#include <stdexcept>
#include <vector>

#include "permlab/bigint.hpp"
#include "permlab/permutation.hpp"
#include "permlab/rng.hpp"

namespace permlab {

// Non-negative 2D lattice point. Serves both as a generating-tree label
// (x = h, y = k) and as a walk position: a label sequence and a quadrant walk
// are the same object here.
struct Pt {
    int x = 0;
    int y = 0;
    friend bool operator==(Pt a, Pt b) { return a.x == b.x && a.y == b.y; }
    friend bool operator!=(Pt a, Pt b) { return !(a == b); }
    friend bool operator<(Pt a, Pt b) { return a.x != b.x ? a.x < b.x : a.y < b.y; }
};

using Label = Pt;
using Walk = std::vector<Pt>;

struct NotInClassError : std::runtime_error {
    int prefix_len;
    NotInClassError(int len, const std::string& msg) : std::runtime_error(msg), prefix_len(len) {}
};

struct InconsistentWalkError : std::runtime_error {
    int position;  // 1-based index of the offending step
    InconsistentWalkError(int pos, const std::string& msg) : std::runtime_error(msg), position(pos) {}
};

struct BudgetExceeded : std::runtime_error {
    using std::runtime_error::runtime_error;
};

// Children of (h,k), in canonical order: (0,k),...,(h-1,k), then (h,k+1),
// then (h+1,0),...,(h+1,k). Always h+k+2 children, all distinct.
inline std::vector<Label> children_strong(Label l) {
    std::vector<Label> out;
    out.reserve(static_cast<size_t>(l.x) + l.y + 2);
    for (int j = 0; j < l.x; ++j) out.push_back({j, l.y});
    out.push_back({l.x, l.y + 1});
    for (int j = 0; j <= l.y; ++j) out.push_back({l.x + 1, j});
    return out;
}

// Children of (h,k), in canonical order: (0,k+1),...,(h,k+1), then
// (h+k+1,0),(h+k,1),...,(h+1,k). Always h+k+2 children, all distinct.
inline std::vector<Label> children_semi(Label l) {
    std::vector<Label> out;
    out.reserve(static_cast<size_t>(l.x) + l.y + 2);
    for (int j = 0; j <= l.x; ++j) out.push_back({j, l.y + 1});
    for (int s = 0; s <= l.y; ++s) out.push_back({l.x + l.y + 1 - s, s});
    return out;
}

// A succession rule: root label plus children map. The built-in rules produce
// distinct children; custom rules may repeat labels, and the enumeration code
// sums multiplicities, so repeats still count correctly.
struct Rule {
    enum class Kind { strong, semi, custom };
    Kind kind = Kind::custom;
    Label root{0, 0};
    std::function<std::vector<Label>(Label)> kids;

    std::vector<Label> children(Label l) const {
        switch (kind) {
            case Kind::strong: return children_strong(l);
            case Kind::semi: return children_semi(l);
            default: return kids(l);
        }
    }

    static Rule strong() { return Rule{Kind::strong, {0, 0}, nullptr}; }
    static Rule semi() { return Rule{Kind::semi, {0, 0}, nullptr}; }
    static Rule custom(Label root, std::function<std::vector<Label>(Label)> fn) {
        return Rule{Kind::custom, root, std::move(fn)};
    }
    static Rule of(Family f) { return f == Family::strong ? strong() : semi(); }
};

// ---------------------------------------------------------------------------
// Triangular tables over {(x,y) : x,y >= 0, x+y <= cap}
// ---------------------------------------------------------------------------

namespace dp {

struct Tri {
    int cap = -1;
    size_t count() const { return cap < 0 ? 0 : static_cast<size_t>(cap + 1) * (cap + 2) / 2; }
    size_t at(int x, int y) const {
        return static_cast<size_t>(x) * (cap + 1) - static_cast<size_t>(x) * (x - 1) / 2 + static_cast<size_t>(y);
    }
    bool inside(int x, int y) const { return x >= 0 && y >= 0 && x + y <= cap; }
};

// Completion counts one level up: out(l) = sum of child(c) over children c of l.
// Long child families are collapsed with prefix sums so each state costs O(1).
template <class Num>
void backward_row_strong(const Tri& ti, const Tri& tc, const std::vector<Num>& child, std::vector<Num>& out) {
    std::vector<Num> colpref(tc.count());  // colpref(h,k) = sum_{j<=h} child(j,k)
    std::vector<Num> rowpref(tc.count());  // rowpref(h,k) = sum_{j<=k} child(h,j)
    for (int k = 0; k <= tc.cap; ++k) {
        for (int h = 0; h + k <= tc.cap; ++h) {
            colpref[tc.at(h, k)] = child[tc.at(h, k)];
            if (h > 0) colpref[tc.at(h, k)] += colpref[tc.at(h - 1, k)];
        }
    }
    for (int h = 0; h <= tc.cap; ++h) {
        for (int k = 0; h + k <= tc.cap; ++k) {
            rowpref[tc.at(h, k)] = child[tc.at(h, k)];
            if (k > 0) rowpref[tc.at(h, k)] += rowpref[tc.at(h, k - 1)];
        }
    }
    out.assign(ti.count(), Num(0));
    for (int h = 0; h <= ti.cap; ++h) {
        for (int k = 0; h + k <= ti.cap; ++k) {
            Num acc(0);
            if (h >= 1) acc += colpref[tc.at(h - 1, k)];
            if (tc.inside(h, k + 1)) acc += child[tc.at(h, k + 1)];
            int jmax = tc.cap - (h + 1);
            if (jmax >= 0) acc += rowpref[tc.at(h + 1, jmax < k ? jmax : k)];
            out[ti.at(h, k)] = std::move(acc);
        }
    }
}

template <class Num>
void backward_row_semi(const Tri& ti, const Tri& tc, const std::vector<Num>& child, std::vector<Num>& out) {
    std::vector<Num> colpref(tc.count());  // colpref(h,k) = sum_{i<=h} child(i,k)
    std::vector<Num> diagpref(tc.count()); // prefix along anti-diagonal, increasing second coord
    for (int k = 0; k <= tc.cap; ++k) {
        for (int h = 0; h + k <= tc.cap; ++h) {
            colpref[tc.at(h, k)] = child[tc.at(h, k)];
            if (h > 0) colpref[tc.at(h, k)] += colpref[tc.at(h - 1, k)];
        }
    }
    for (int d = 0; d <= tc.cap; ++d) {
        for (int s = 0; s <= d; ++s) {
            diagpref[tc.at(d - s, s)] = child[tc.at(d - s, s)];
            if (s > 0) diagpref[tc.at(d - s, s)] += diagpref[tc.at(d - s + 1, s - 1)];
        }
    }
    out.assign(ti.count(), Num(0));
    for (int h = 0; h <= ti.cap; ++h) {
        for (int k = 0; h + k <= ti.cap; ++k) {
            Num acc(0);
            int imax = tc.cap - (k + 1);
            if (imax >= 0) acc += colpref[tc.at(h < imax ? h : imax, k + 1)];
            int d = h + k + 1;
            if (d <= tc.cap) acc += diagpref[tc.at(d - k, k)];  // s <= k <= d always here
            out[ti.at(h, k)] = std::move(acc);
        }
    }
}

template <class Num>
void backward_row(Family f, const Tri& ti, const Tri& tc, const std::vector<Num>& child, std::vector<Num>& out) {
    if (f == Family::strong)
        backward_row_strong(ti, tc, child, out);
    else
        backward_row_semi(ti, tc, child, out);
}

// Forward step: number of tree paths reaching each label of the next level.
template <class Num>
void forward_row_strong(const Tri& ti, const Tri& tn, const std::vector<Num>& cur, std::vector<Num>& out) {
    std::vector<Num> colsuf(ti.count());  // colsuf(h,k) = sum_{j>=h} cur(j,k)
    std::vector<Num> rowsuf(ti.count());  // rowsuf(h,k) = sum_{j>=k} cur(h,j)
    for (int k = 0; k <= ti.cap; ++k) {
        for (int h = ti.cap - k; h >= 0; --h) {
            colsuf[ti.at(h, k)] = cur[ti.at(h, k)];
            if (h + 1 + k <= ti.cap) colsuf[ti.at(h, k)] += colsuf[ti.at(h + 1, k)];
        }
    }
    for (int h = 0; h <= ti.cap; ++h) {
        for (int k = ti.cap - h; k >= 0; --k) {
            rowsuf[ti.at(h, k)] = cur[ti.at(h, k)];
            if (h + k + 1 <= ti.cap) rowsuf[ti.at(h, k)] += rowsuf[ti.at(h, k + 1)];
        }
    }
    out.assign(tn.count(), Num(0));
    for (int h = 0; h <= tn.cap; ++h) {
        for (int k = 0; h + k <= tn.cap; ++k) {
            Num acc(0);
            if (ti.inside(h + 1, k)) acc += colsuf[ti.at(h + 1, k)];
            if (k >= 1 && ti.inside(h, k - 1)) acc += cur[ti.at(h, k - 1)];
            if (h >= 1 && ti.inside(h - 1, k)) acc += rowsuf[ti.at(h - 1, k)];
            out[tn.at(h, k)] = std::move(acc);
        }
    }
}

template <class Num>
void forward_row_semi(const Tri& ti, const Tri& tn, const std::vector<Num>& cur, std::vector<Num>& out) {
    std::vector<Num> colsuf(ti.count());
    std::vector<Num> diagsuf(ti.count());  // suffix along anti-diagonal, decreasing second coord
    for (int k = 0; k <= ti.cap; ++k) {
        for (int h = ti.cap - k; h >= 0; --h) {
            colsuf[ti.at(h, k)] = cur[ti.at(h, k)];
            if (h + 1 + k <= ti.cap) colsuf[ti.at(h, k)] += colsuf[ti.at(h + 1, k)];
        }
    }
    for (int d = 0; d <= ti.cap; ++d) {
        for (int s = d; s >= 0; --s) {
            diagsuf[ti.at(d - s, s)] = cur[ti.at(d - s, s)];
            if (s + 1 <= d) diagsuf[ti.at(d - s, s)] += diagsuf[ti.at(d - s - 1, s + 1)];
        }
    }
    out.assign(tn.count(), Num(0));
    for (int h = 0; h <= tn.cap; ++h) {
        for (int k = 0; h + k <= tn.cap; ++k) {
            Num acc(0);
            if (k >= 1 && ti.inside(h, k - 1)) acc += colsuf[ti.at(h, k - 1)];
            int d = h + k - 1;
            if (d >= 0 && d <= ti.cap && k <= d) acc += diagsuf[ti.at(d - k, k)];
            out[tn.at(h, k)] = std::move(acc);
        }
    }
}

template <class Num>
void forward_row(Family f, const Tri& ti, const Tri& tn, const std::vector<Num>& cur, std::vector<Num>& out) {
    if (f == Family::strong)
        forward_row_strong(ti, tn, cur, out);
    else
        forward_row_semi(ti, tn, cur, out);
}

}  // namespace dp

// ---------------------------------------------------------------------------
// Exact enumeration
// ---------------------------------------------------------------------------

// Label multiset of tree level n (labels plus multiplicities), exact integers.
inline std::map<Label, BigUint> labels_at_level(const Rule& rule, int n) {
    if (n < 1) throw std::invalid_argument("labels_at_level: n must be >= 1");
    if (rule.kind == Rule::Kind::custom) {
        std::map<Label, BigUint> cur;
        cur[rule.root] = BigUint(1);
        for (int lvl = 1; lvl < n; ++lvl) {
            std::map<Label, BigUint> next;
            for (const auto& [l, cnt] : cur)
                for (Label c : rule.children(l)) next[c] += cnt;
            cur = std::move(next);
        }
        return cur;
    }
    Family f = rule.kind == Rule::Kind::strong ? Family::strong : Family::semi;
    dp::Tri ti{0};
    std::vector<BigUint> cur(1, BigUint(1));
    for (int lvl = 1; lvl < n; ++lvl) {
        dp::Tri tn{lvl};
        std::vector<BigUint> next;
        dp::forward_row(f, ti, tn, cur, next);
        cur = std::move(next);
        ti = tn;
    }
    std::map<Label, BigUint> out;
    for (int h = 0; h <= ti.cap; ++h)
        for (int k = 0; h + k <= ti.cap; ++k)
            if (!cur[ti.at(h, k)].is_zero()) out[{h, k}] = cur[ti.at(h, k)];
    return out;
}

// Exact number of size-n members of the class the rule generates.
inline BigUint count_members(const Rule& rule, int n) {
    BigUint total(0);
    for (const auto& [l, cnt] : labels_at_level(rule, n)) {
        (void)l;
        total += cnt;
    }
    return total;
}

inline BigUint count_members(Family f, int n) { return count_members(Rule::of(f), n); }

// Depth-first enumeration of all label sequences of length n (== all quadrant
// walks of the family). fn receives each complete walk.
inline void for_each_walk(const Rule& rule, int n, const std::function<void(const Walk&)>& fn) {
    Walk w{rule.root};
    std::function<void()> rec = [&]() {
        if (static_cast<int>(w.size()) == n) {
            fn(w);
            return;
        }
        for (Label c : rule.children(w.back())) {
            w.push_back(c);
            rec();
            w.pop_back();
        }
    };
    rec();
}

inline void for_each_walk(Family f, int n, const std::function<void(const Walk&)>& fn) {
    for_each_walk(Rule::of(f), n, fn);
}

// ---------------------------------------------------------------------------
// The bijection between class members and label sequences
// ---------------------------------------------------------------------------

// Label sequence of sigma, one label per prefix. Active sites are found with
// the membership oracle on every insertion, independently of the succession
// rule, so round trips with walk_to_perm cross-check the two constructions.
inline Walk perm_to_walk(const Permutation& sigma, Family fam) {
    const PermClass& cls = PermClass::of(fam);
    Walk out;
    out.reserve(sigma.size());
    for (int m = 1; m <= sigma.size(); ++m) {
        std::vector<int> head(sigma.values().begin(), sigma.values().begin() + m);
        Permutation prefix = standardize(head);
        if (!cls.member(prefix))
            throw NotInClassError(m, std::string("prefix of length ") + std::to_string(m) +
                                         " is not " + cls.name);
        std::vector<int> sites = active_sites(prefix, cls);
        int last = prefix(m);
        int le = 0;
        for (int s : sites)
            if (s <= last) ++le;
        out.push_back({le - 1, static_cast<int>(sites.size()) - le - 1});
    }
    return out;
}

namespace detail {

// Active-site bookkeeping for the inverse bijection. lower holds the sites
// <= current last value, upper the sites above it, both ascending.
struct SiteTracker {
    std::vector<int> lower{1};
    std::vector<int> upper{2};

    int x() const { return static_cast<int>(lower.size()) - 1; }
    int y() const { return static_cast<int>(upper.size()) - 1; }

    // Applies one step; returns the insertion value, throws on an increment
    // that is not a child move for the family.
    int step(Family fam, int dx, int dy, int pos) {
        if (fam == Family::strong) {
            if (dx == 1 && dy <= 0 && -dy <= y()) {
                int i = -dy;
                int v = upper[i];
                lower.push_back(v);
                std::vector<int> nu;
                nu.reserve(static_cast<size_t>(y()) - i + 1);
                nu.push_back(v + 1);
                for (size_t j = i + 1; j < upper.size(); ++j) nu.push_back(upper[j] + 1);
                upper = std::move(nu);
                return v;
            }
            if (dx == 0 && dy == 1) {
                int v = lower.back();
                std::vector<int> nu;
                nu.reserve(upper.size() + 1);
                nu.push_back(v + 1);
                for (int s : upper) nu.push_back(s + 1);
                upper = std::move(nu);
                return v;
            }
            if (dy == 0 && dx <= -1 && -dx <= x()) {
                int i = -dx;
                int v = lower[lower.size() - 1 - i];
                lower.resize(lower.size() - i);
                for (int& s : upper) ++s;
                return v;
            }
        } else {
            if (dx >= 1 && dy == 1 - dx && dx <= y() + 1) {
                int i = dx;
                int v = upper[i - 1];
                for (int j = 0; j < i; ++j) lower.push_back(upper[j]);
                std::vector<int> nu;
                nu.reserve(static_cast<size_t>(y()) - i + 2);
                nu.push_back(v + 1);
                for (size_t j = i; j < upper.size(); ++j) nu.push_back(upper[j] + 1);
                upper = std::move(nu);
                return v;
            }
            if (dy == 1 && dx <= 0 && -dx <= x()) {
                int i = -dx;
                int v = lower[lower.size() - 1 - i];
                lower.resize(lower.size() - i);
                std::vector<int> nu;
                nu.reserve(upper.size() + 1);
                nu.push_back(v + 1);
                for (int s : upper) nu.push_back(s + 1);
                upper = std::move(nu);
                return v;
            }
        }
        throw InconsistentWalkError(pos, "labels at positions " + std::to_string(pos) + "," +
                                             std::to_string(pos + 1) +
                                             " are not consistent with the succession rule");
    }
};

}  // namespace detail

// Inverse bijection: label sequence -> class member. Inserts the new final
// value at the site selected by each increment and maintains the site lists
// directly from the rule, with no membership oracle involved.
inline Permutation walk_to_perm(const Walk& w, Family fam) {
    if (w.empty()) throw std::invalid_argument("walk_to_perm: empty walk");
    if (w[0] != Pt{0, 0}) throw InconsistentWalkError(1, "walk must start at the root label (0,0)");
    std::vector<int> vals{1};
    detail::SiteTracker sites;
    for (size_t i = 1; i < w.size(); ++i) {
        int dx = w[i].x - w[i - 1].x;
        int dy = w[i].y - w[i - 1].y;
        int v = sites.step(fam, dx, dy, static_cast<int>(i));
        for (int& x : vals)
            if (x >= v) ++x;
        vals.push_back(v);
        if (sites.x() != w[i].x || sites.y() != w[i].y)
            throw InconsistentWalkError(static_cast<int>(i), "site lists disagree with the walk label");
    }
    return Permutation(std::move(vals));
}

// ---------------------------------------------------------------------------
// Exact uniform sampling by completion counts
// ---------------------------------------------------------------------------

struct SamplerOptions {
    int budget = 500;              // hard refusal above this unless raised
    int exact_bignum_max = 200;    // exact integer counts up to here
    int cap_floor = 192;           // label-sum cap, floating-point mode
    double cap_factor = 6.0;
    size_t store_all_max_entries = 16000000;  // else two-level checkpointing
};

// Draws exactly uniform size-n members of a built-in family, encoded as label
// sequences. Counts are exact big integers up to exact_bignum_max; above, a
// per-level-rescaled double table is used (and the label-sum space is capped,
// which truncates an exponentially small tail of walks).
class ExactSampler {
public:
    ExactSampler(Family fam, int n, SamplerOptions opt = {}) : fam_(fam), n_(n), opt_(opt) {
        if (n < 1) throw std::invalid_argument("sampler: n must be >= 1");
        if (n > opt.budget)
            throw BudgetExceeded("size " + std::to_string(n) + " exceeds the DP budget (" +
                                 std::to_string(opt.budget) +
                                 "); use the rejection sampler for small sizes or raise the budget");
        if (n <= opt.exact_bignum_max) {
            mode_ = Mode::bignum;
            build_bignum();
        } else {
            cap_ = cap_for(n);
            size_t total = 0;
            for (int lvl = 1; lvl <= n; ++lvl) total += dp::Tri{level_cap(lvl)}.count();
            mode_ = total <= opt.store_all_max_entries ? Mode::dense : Mode::checkpointed;
            if (mode_ == Mode::dense)
                build_dense();
            else
                build_checkpointed();
        }
    }

    Family family() const { return fam_; }
    int size() const { return n_; }
    bool exact() const { return mode_ == Mode::bignum; }

    // Exact member count (bignum mode only).
    const BigUint& total_count() const {
        if (mode_ != Mode::bignum) throw std::logic_error("total_count: not in exact mode");
        return big_rows_[0][0];
    }

    Walk sample(Rng& rng) const {
        if (mode_ == Mode::bignum) return sample_bignum(rng);
        std::unique_lock<std::mutex> guard(mu_, std::defer_lock);
        if (mode_ == Mode::checkpointed) guard.lock();  // row cache is shared
        return sample_double(rng);
    }

private:
    enum class Mode { bignum, dense, checkpointed };

    int cap_for(int n) const {
        int c = static_cast<int>(opt_.cap_factor * std::sqrt(static_cast<double>(n))) + 1;
        if (c < opt_.cap_floor) c = opt_.cap_floor;
        if (c > n - 1) c = n - 1;
        return c;
    }

    int level_cap(int lvl) const {
        int c = lvl - 1;
        if (mode_ != Mode::bignum && c > cap_) c = cap_;
        return c;
    }

    void build_bignum() {
        big_rows_.resize(n_);
        big_rows_[n_ - 1].assign(dp::Tri{n_ - 1}.count(), BigUint(1));
        for (int lvl = n_ - 1; lvl >= 1; --lvl) {
            dp::Tri ti{lvl - 1}, tc{lvl};
            dp::backward_row(fam_, ti, tc, big_rows_[lvl], big_rows_[lvl - 1]);
        }
    }

    static void normalize(std::vector<double>& row) {
        double mx = 0;
        for (double v : row)
            if (v > mx) mx = v;
        if (mx > 0)
            for (double& v : row) v /= mx;
    }

    void build_dense() {
        dbl_rows_.resize(n_);
        dbl_rows_[n_ - 1].assign(dp::Tri{level_cap(n_)}.count(), 1.0);
        for (int lvl = n_ - 1; lvl >= 1; --lvl) {
            dp::Tri ti{level_cap(lvl)}, tc{level_cap(lvl + 1)};
            dp::backward_row(fam_, ti, tc, dbl_rows_[lvl], dbl_rows_[lvl - 1]);
            normalize(dbl_rows_[lvl - 1]);
        }
    }

    // Two-level checkpointing: keep rows at levels 1 mod s1_, rebuild the
    // s2_-spaced rows of one s1-block on demand, then one s2-block in full.
    // Memory is O(n^{1/3}) rows; the extra work is two more full passes.
    void build_checkpointed() {
        s2_ = std::max(2, static_cast<int>(std::ceil(std::cbrt(static_cast<double>(n_)))));
        s1_ = s2_ * s2_;
        l1_.assign(static_cast<size_t>((n_ - 1) / s1_) + 1, {});
        std::vector<double> cur = base_row();
        std::vector<double> next;
        for (int lvl = n_ - 1; lvl >= 1; --lvl) {
            dp::Tri ti{level_cap(lvl)}, tc{level_cap(lvl + 1)};
            dp::backward_row(fam_, ti, tc, cur, next);
            normalize(next);
            cur.swap(next);
            if ((lvl - 1) % s1_ == 0) l1_[(lvl - 1) / s1_] = cur;
        }
    }

    const std::vector<double>& base_row() const {
        if (base_.empty()) base_.assign(dp::Tri{level_cap(n_)}.count(), 1.0);
        return base_;
    }

    // Recomputes rows hi-1 down to lo from row(hi); same chain of operations
    // as the build, so recomputed rows are bit-identical.
    template <class Sink>
    void recompute_down(int lo, int hi, const std::vector<double>& hi_row, Sink&& sink) const {
        std::vector<double> cur = hi_row;
        std::vector<double> next;
        for (int lvl = hi - 1; lvl >= lo; --lvl) {
            dp::Tri ti{level_cap(lvl)}, tc{level_cap(lvl + 1)};
            dp::backward_row(fam_, ti, tc, cur, next);
            normalize(next);
            cur.swap(next);
            sink(lvl, cur);
        }
    }

    const std::vector<double>& dbl_row(int lvl) const {
        if (mode_ == Mode::dense) return dbl_rows_[lvl - 1];
        if (lvl == n_) return base_row();
        int b2 = lvl - (lvl - 1) % s2_;
        if (block_base_ != b2) {
            int b1 = lvl - (lvl - 1) % s1_;
            if (l2_base_ != b1) {
                int top1 = std::min(b1 + s1_, n_);
                const std::vector<double>& src =
                    top1 == n_ ? base_row() : l1_[(top1 - 1) / s1_];
                l2_.assign(static_cast<size_t>(s1_ / s2_) + 1, {});
                if ((top1 - b1) % s2_ == 0) l2_[(top1 - b1) / s2_] = src;
                recompute_down(b1, top1, src, [&](int l, const std::vector<double>& r) {
                    if ((l - b1) % s2_ == 0) l2_[(l - b1) / s2_] = r;
                });
                l2_base_ = b1;
                block_base_ = -1;
            }
            int top2 = std::min(b2 + s2_, n_);
            const std::vector<double>* src2;
            if (top2 == n_)
                src2 = &base_row();
            else if ((top2 - 1) % s1_ == 0)
                src2 = &l1_[(top2 - 1) / s1_];
            else
                src2 = &l2_[(top2 - l2_base_) / s2_];
            block_.assign(static_cast<size_t>(s2_), {});
            recompute_down(b2, top2, *src2, [&](int l, const std::vector<double>& r) { block_[l - b2] = r; });
            block_base_ = b2;
        }
        return block_[lvl - b2];
    }

    Walk sample_bignum(Rng& rng) const {
        Walk w{Label{0, 0}};
        Label cur{0, 0};
        for (int lvl = 1; lvl < n_; ++lvl) {
            const auto& row = big_rows_[lvl];  // level lvl+1
            dp::Tri tc{lvl};
            auto kids = Rule::of(fam_).children(cur);
            BigUint total(0);
            for (Label c : kids)
                if (tc.inside(c.x, c.y)) total += row[tc.at(c.x, c.y)];
            BigUint r = total.random_below(rng);
            for (Label c : kids) {
                if (!tc.inside(c.x, c.y)) continue;
                const BigUint& wgt = row[tc.at(c.x, c.y)];
                if (BigUint::cmp(r, wgt) < 0) {
                    cur = c;
                    break;
                }
                r -= wgt;
            }
            w.push_back(cur);
        }
        return w;
    }

    Walk sample_double(Rng& rng) const {
        Walk w{Label{0, 0}};
        Label cur{0, 0};
        for (int lvl = 1; lvl < n_; ++lvl) {
            const auto& row = dbl_row(lvl + 1);
            dp::Tri tc{level_cap(lvl + 1)};
            auto kids = Rule::of(fam_).children(cur);
            double total = 0;
            for (Label c : kids)
                if (tc.inside(c.x, c.y)) total += row[tc.at(c.x, c.y)];
            double r = rng.uniform() * total;
            Label pick = cur;
            bool found = false;
            for (Label c : kids) {
                if (!tc.inside(c.x, c.y)) continue;
                double wgt = row[tc.at(c.x, c.y)];
                if (wgt <= 0) continue;
                pick = c;
                found = true;
                if (r < wgt) break;
                r -= wgt;
            }
            if (!found) throw std::logic_error("sampler: dead state (cap too small)");
            cur = pick;
            w.push_back(cur);
        }
        return w;
    }

    Family fam_;
    int n_;
    SamplerOptions opt_;
    Mode mode_ = Mode::bignum;
    int cap_ = 0;
    std::vector<std::vector<BigUint>> big_rows_;  // big_rows_[lvl-1] = level lvl
    std::vector<std::vector<double>> dbl_rows_;
    // checkpointing state
    int s1_ = 0, s2_ = 0;
    std::vector<std::vector<double>> l1_;
    mutable std::vector<double> base_;
    mutable std::vector<std::vector<double>> l2_;
    mutable std::vector<std::vector<double>> block_;
    mutable int l2_base_ = -1, block_base_ = -1;
    mutable std::mutex mu_;
};

// One-call convenience: exact uniform size-n member of the family.
inline Walk sample_uniform_exact(Family fam, int n, uint64_t seed, SamplerOptions opt = {}) {
    ExactSampler s(fam, n, opt);
    Rng rng(seed);
    return s.sample(rng);
}

}  // namespace permlab
