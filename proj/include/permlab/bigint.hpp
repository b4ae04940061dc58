#pragma once

#include <cstdint>
#include <stdexcept>
#include <string>
#include <vector>

#include "permlab/rng.hpp"

namespace permlab {

// Unsigned arbitrary-precision integer, base 2^64 limbs, little-endian.
// Covers what the enumeration DP and the exact sampler need: addition,
// comparison, subtraction of a smaller value, decimal printing, conversion
// to double, and uniform sampling below a bound.
class BigUint {
public:
    BigUint() = default;
    BigUint(uint64_t v) {  // NOLINT: implicit by design, 1 and 0 literals are common
        if (v != 0) limbs_.push_back(v);
    }

    bool is_zero() const { return limbs_.empty(); }

    BigUint& operator+=(const BigUint& o) {
        if (limbs_.size() < o.limbs_.size()) limbs_.resize(o.limbs_.size(), 0);
        unsigned __int128 carry = 0;
        size_t i = 0;
        for (; i < o.limbs_.size(); ++i) {
            unsigned __int128 s = carry + limbs_[i] + o.limbs_[i];
            limbs_[i] = static_cast<uint64_t>(s);
            carry = s >> 64;
        }
        for (; carry && i < limbs_.size(); ++i) {
            unsigned __int128 s = carry + limbs_[i];
            limbs_[i] = static_cast<uint64_t>(s);
            carry = s >> 64;
        }
        if (carry) limbs_.push_back(static_cast<uint64_t>(carry));
        return *this;
    }

    friend BigUint operator+(BigUint a, const BigUint& b) { a += b; return a; }

    // Requires *this >= o.
    BigUint& operator-=(const BigUint& o) {
        if (cmp(*this, o) < 0) throw std::underflow_error("BigUint: negative result");
        uint64_t borrow = 0;
        for (size_t i = 0; i < limbs_.size(); ++i) {
            unsigned __int128 need = static_cast<unsigned __int128>(i < o.limbs_.size() ? o.limbs_[i] : 0) + borrow;
            unsigned __int128 cur = limbs_[i];
            if (cur >= need) {
                limbs_[i] = static_cast<uint64_t>(cur - need);
                borrow = 0;
            } else {
                limbs_[i] = static_cast<uint64_t>((static_cast<unsigned __int128>(1) << 64) + cur - need);
                borrow = 1;
            }
        }
        trim();
        return *this;
    }

    static int cmp(const BigUint& a, const BigUint& b) {
        if (a.limbs_.size() != b.limbs_.size())
            return a.limbs_.size() < b.limbs_.size() ? -1 : 1;
        for (size_t i = a.limbs_.size(); i-- > 0;) {
            if (a.limbs_[i] != b.limbs_[i]) return a.limbs_[i] < b.limbs_[i] ? -1 : 1;
        }
        return 0;
    }

    friend bool operator<(const BigUint& a, const BigUint& b) { return cmp(a, b) < 0; }
    friend bool operator<=(const BigUint& a, const BigUint& b) { return cmp(a, b) <= 0; }
    friend bool operator==(const BigUint& a, const BigUint& b) { return cmp(a, b) == 0; }
    friend bool operator!=(const BigUint& a, const BigUint& b) { return cmp(a, b) != 0; }

    double to_double() const {
        double r = 0.0;
        for (size_t i = limbs_.size(); i-- > 0;) r = r * 18446744073709551616.0 + static_cast<double>(limbs_[i]);
        return r;
    }

    uint64_t low64() const { return limbs_.empty() ? 0 : limbs_[0]; }
    bool fits_u64() const { return limbs_.size() <= 1; }

    size_t bit_length() const {
        if (limbs_.empty()) return 0;
        uint64_t top = limbs_.back();
        size_t b = (limbs_.size() - 1) * 64;
        while (top) { ++b; top >>= 1; }
        return b;
    }

    std::string to_string() const {
        if (is_zero()) return "0";
        std::vector<uint32_t> chunks;  // base 1e9, little-endian
        BigUint tmp = *this;
        while (!tmp.is_zero()) chunks.push_back(tmp.div_small(1000000000u));
        std::string out = std::to_string(chunks.back());
        for (size_t i = chunks.size() - 1; i-- > 0;) {
            std::string part = std::to_string(chunks[i]);
            out += std::string(9 - part.size(), '0') + part;
        }
        return out;
    }

    // Uniform in [0, *this), requires nonzero bound.
    BigUint random_below(Rng& rng) const {
        if (is_zero()) throw std::invalid_argument("random_below: zero bound");
        size_t bits = bit_length();
        size_t nl = (bits + 63) / 64;
        uint64_t top_mask = (bits % 64 == 0) ? ~0ULL : ((1ULL << (bits % 64)) - 1);
        for (;;) {
            BigUint r;
            r.limbs_.resize(nl);
            for (size_t i = 0; i < nl; ++i) r.limbs_[i] = rng.next_u64();
            r.limbs_.back() &= top_mask;
            r.trim();
            if (cmp(r, *this) < 0) return r;
        }
    }

private:
    // Divides in place by d, returns remainder.
    uint32_t div_small(uint32_t d) {
        unsigned __int128 rem = 0;
        for (size_t i = limbs_.size(); i-- > 0;) {
            unsigned __int128 cur = (rem << 64) | limbs_[i];
            limbs_[i] = static_cast<uint64_t>(cur / d);
            rem = cur % d;
        }
        trim();
        return static_cast<uint32_t>(rem);
    }

    void trim() {
        while (!limbs_.empty() && limbs_.back() == 0) limbs_.pop_back();
    }

    std::vector<uint64_t> limbs_;
};

}  // namespace permlab
