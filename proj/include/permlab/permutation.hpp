#pragma once

#include <algorithm>
#include <cstdint>
#include <functional>
#include <numeric>
#include <stdexcept>
#include <string>
#include <vector>

namespace permlab {

enum class Family { strong, semi };

inline const char* family_name(Family f) { return f == Family::strong ? "strong" : "semi"; }

inline Family parse_family(const std::string& s) {
    if (s == "strong") return Family::strong;
    if (s == "semi") return Family::semi;
    throw std::invalid_argument("unknown family: " + s);
}

// Permutation in one-line notation; values(i) for i in [1,n].
class Permutation {
public:
    Permutation() = default;
    explicit Permutation(std::vector<int> one_line) : v_(std::move(one_line)) { validate(); }
    Permutation(std::initializer_list<int> vals) : v_(vals) { validate(); }

    int size() const { return static_cast<int>(v_.size()); }
    int operator()(int pos) const { return v_[pos - 1]; }
    const std::vector<int>& values() const { return v_; }

    static Permutation identity(int n) {
        std::vector<int> v(n);
        std::iota(v.begin(), v.end(), 1);
        return Permutation(std::move(v));
    }

    static Permutation reversed(int n) {
        std::vector<int> v(n);
        for (int i = 0; i < n; ++i) v[i] = n - i;
        return Permutation(std::move(v));
    }

    friend bool operator==(const Permutation& a, const Permutation& b) { return a.v_ == b.v_; }
    friend bool operator!=(const Permutation& a, const Permutation& b) { return a.v_ != b.v_; }
    friend bool operator<(const Permutation& a, const Permutation& b) { return a.v_ < b.v_; }

    std::string to_string() const {
        std::string s;
        for (int i = 0; i < size(); ++i) {
            if (i) s += ' ';
            s += std::to_string(v_[i]);
        }
        return s;
    }

private:
    void validate() const {
        int n = size();
        std::vector<char> seen(n + 1, 0);
        for (int x : v_) {
            if (x < 1 || x > n || seen[x]) throw std::invalid_argument("not a permutation of 1..n");
            seen[x] = 1;
        }
    }

    std::vector<int> v_;
};

// Unique permutation in the same relative order as the given distinct values.
template <class T>
Permutation standardize(const std::vector<T>& values) {
    int n = static_cast<int>(values.size());
    std::vector<int> idx(n);
    std::iota(idx.begin(), idx.end(), 0);
    std::sort(idx.begin(), idx.end(), [&](int a, int b) { return values[a] < values[b]; });
    for (int i = 0; i + 1 < n; ++i) {
        if (!(values[idx[i]] < values[idx[i + 1]])) throw std::invalid_argument("standardize: duplicate values");
    }
    std::vector<int> out(n);
    for (int r = 0; r < n; ++r) out[idx[r]] = r + 1;
    return Permutation(std::move(out));
}

// Permutation induced by the positions I (1-based, any order, must be distinct).
inline Permutation pattern_at(const Permutation& sigma, const std::vector<int>& positions) {
    if (positions.empty()) throw std::invalid_argument("pattern_at: empty index set");
    std::vector<int> I = positions;
    std::sort(I.begin(), I.end());
    std::vector<int> vals;
    vals.reserve(I.size());
    int prev = 0;
    for (int p : I) {
        if (p < 1 || p > sigma.size()) throw std::out_of_range("pattern_at: index out of range");
        if (p == prev) throw std::invalid_argument("pattern_at: repeated index");
        prev = p;
        vals.push_back(sigma(p));
    }
    return standardize(vals);
}

// Appends a new final value m in [1, n+1]: existing values >= m shift up by one.
inline Permutation append_value(const Permutation& sigma, int m) {
    int n = sigma.size();
    if (m < 1 || m > n + 1) throw std::out_of_range("append_value: site out of range");
    std::vector<int> v;
    v.reserve(n + 1);
    for (int x : sigma.values()) v.push_back(x >= m ? x + 1 : x);
    v.push_back(m);
    return Permutation(std::move(v));
}

// Size-4 pattern with one pair of adjacent positions (adj, adj+1) that must be
// consecutive in the host.
struct VincularPattern {
    Permutation pattern;
    int adj;  // 1-based, adjacency between pattern positions adj and adj+1

    VincularPattern(Permutation p, int adjacency) : pattern(std::move(p)), adj(adjacency) {
        if (pattern.size() != 4) throw std::invalid_argument("vincular pattern must have size 4");
        if (adj < 1 || adj > 3) throw std::invalid_argument("adjacency positions must be consecutive pattern indices");
    }
};

namespace detail {
inline bool matches4(const Permutation& sigma, const Permutation& pat, int q1, int q2, int q3, int q4) {
    int s[4] = {sigma(q1), sigma(q2), sigma(q3), sigma(q4)};
    const auto& p = pat.values();
    for (int a = 0; a < 4; ++a)
        for (int b = a + 1; b < 4; ++b)
            if ((s[a] < s[b]) != (p[a] < p[b])) return false;
    return true;
}
}  // namespace detail

// Brute-force scan over all index choices with the required adjacency.
inline bool contains_vincular(const Permutation& sigma, const VincularPattern& vp) {
    int n = sigma.size();
    if (n < 4) return false;
    switch (vp.adj) {
        case 2:  // occurrences at positions (i, j, j+1, k), i < j, j+1 < k
            for (int j = 2; j + 2 <= n; ++j)
                for (int i = 1; i < j; ++i)
                    for (int k = j + 2; k <= n; ++k)
                        if (detail::matches4(sigma, vp.pattern, i, j, j + 1, k)) return true;
            return false;
        case 1:  // (j, j+1, a, b), j+1 < a < b
            for (int j = 1; j + 3 <= n; ++j)
                for (int a = j + 2; a < n; ++a)
                    for (int b = a + 1; b <= n; ++b)
                        if (detail::matches4(sigma, vp.pattern, j, j + 1, a, b)) return true;
            return false;
        case 3:  // (a, b, j, j+1), a < b < j
            for (int j = 3; j + 1 <= n; ++j)
                for (int a = 1; a + 1 < j; ++a)
                    for (int b = a + 1; b < j; ++b)
                        if (detail::matches4(sigma, vp.pattern, a, b, j, j + 1)) return true;
            return false;
        default:
            return false;
    }
}

// Avoidance class given by a set of vincular patterns. New classes can be
// configured by listing their patterns; membership is the conjunction of
// contains == false.
struct PermClass {
    std::string name;
    std::vector<VincularPattern> avoided;

    bool member(const Permutation& sigma) const {
        for (const auto& p : avoided)
            if (contains_vincular(sigma, p)) return false;
        return true;
    }

    static const PermClass& strong_baxter() {
        static const PermClass c{"strong-baxter",
                                 {VincularPattern(Permutation{2, 4, 1, 3}, 2),
                                  VincularPattern(Permutation{3, 1, 4, 2}, 2),
                                  VincularPattern(Permutation{3, 4, 1, 2}, 2)}};
        return c;
    }

    static const PermClass& semi_baxter() {
        static const PermClass c{"semi-baxter", {VincularPattern(Permutation{2, 4, 1, 3}, 2)}};
        return c;
    }

    static const PermClass& of(Family f) {
        return f == Family::strong ? strong_baxter() : semi_baxter();
    }
};

inline bool is_strong_baxter(const Permutation& s) { return PermClass::strong_baxter().member(s); }
inline bool is_semi_baxter(const Permutation& s) { return PermClass::semi_baxter().member(s); }

// Active sites of sigma for a class: the insertion values m such that the
// extended permutation stays in the class. Computed purely through the
// membership oracle.
inline std::vector<int> active_sites(const Permutation& sigma, const PermClass& cls) {
    std::vector<int> sites;
    for (int m = 1; m <= sigma.size() + 1; ++m)
        if (cls.member(append_value(sigma, m))) sites.push_back(m);
    return sites;
}

// Calls fn for each permutation of size n in lexicographic order.
inline void for_each_permutation(int n, const std::function<void(const Permutation&)>& fn) {
    std::vector<int> v(n);
    std::iota(v.begin(), v.end(), 1);
    do {
        fn(Permutation(v));
    } while (std::next_permutation(v.begin(), v.end()));
}

inline uint64_t count_members_brute(const PermClass& cls, int n) {
    uint64_t count = 0;
    for_each_permutation(n, [&](const Permutation& p) {
        if (cls.member(p)) ++count;
    });
    return count;
}

}  // namespace permlab
