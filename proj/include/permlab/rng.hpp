#pragma once

#include <cmath>
#include <cstdint>

namespace permlab {

// SplitMix64. Used to seed the main generator and to derive sub-stream seeds.
struct SplitMix64 {
    uint64_t state;
    explicit SplitMix64(uint64_t seed) : state(seed) {}
    uint64_t next() {
        uint64_t z = (state += 0x9e3779b97f4a7c15ULL);
        z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ULL;
        z = (z ^ (z >> 27)) * 0x94d049bb133111ebULL;
        return z ^ (z >> 31);
    }
};

// Seed of sub-stream `stream` under master seed `master`. Replicate i always
// draws from derive_seed(seed, i), so results do not depend on how replicates
// are scheduled across threads.
inline uint64_t derive_seed(uint64_t master, uint64_t stream) {
    SplitMix64 sm(master ^ (0x9e3779b97f4a7c15ULL * (stream + 1)));
    uint64_t a = sm.next();
    uint64_t b = sm.next();
    return a ^ (b << 1);
}

// xoshiro256++ with SplitMix64 seeding.
class Rng {
public:
    explicit Rng(uint64_t seed) {
        SplitMix64 sm(seed);
        for (auto& w : s_) w = sm.next();
        if ((s_[0] | s_[1] | s_[2] | s_[3]) == 0) s_[3] = 1;
    }

    uint64_t next_u64() {
        uint64_t result = rotl(s_[0] + s_[3], 23) + s_[0];
        uint64_t t = s_[1] << 17;
        s_[2] ^= s_[0];
        s_[3] ^= s_[1];
        s_[1] ^= s_[2];
        s_[0] ^= s_[3];
        s_[2] ^= t;
        s_[3] = rotl(s_[3], 45);
        return result;
    }

    // Uniform on (0,1]; never returns 0, safe as log() argument.
    double uniform_pos() { return static_cast<double>((next_u64() >> 11) + 1) * 0x1.0p-53; }

    // Uniform on [0,1).
    double uniform() { return static_cast<double>(next_u64() >> 11) * 0x1.0p-53; }

    // Uniform integer in [0, n), unbiased.
    uint64_t below(uint64_t n) {
        uint64_t mask = n - 1;
        mask |= mask >> 1; mask |= mask >> 2; mask |= mask >> 4;
        mask |= mask >> 8; mask |= mask >> 16; mask |= mask >> 32;
        for (;;) {
            uint64_t v = next_u64() & mask;
            if (v < n) return v;
        }
    }

    // Geometric on {0,1,2,...} with P(i) = (1-r) r^i, sampled by inverse CDF,
    // so the infinite tail is never truncated. r = 0 gives the point mass at 0.
    int64_t geometric(double r) {
        if (r <= 0.0) return 0;
        double u = uniform_pos();
        if (u == 1.0) return 0;
        return static_cast<int64_t>(std::floor(std::log(u) / std::log(r)));
    }

    // Standard normal via Box-Muller, implementation-pinned for reproducibility.
    double gaussian() {
        if (have_spare_) {
            have_spare_ = false;
            return spare_;
        }
        double u1 = uniform_pos();
        double u2 = uniform();
        double m = std::sqrt(-2.0 * std::log(u1));
        double a = 6.283185307179586476925286766559 * u2;
        spare_ = m * std::sin(a);
        have_spare_ = true;
        return m * std::cos(a);
    }

private:
    static uint64_t rotl(uint64_t x, int k) { return (x << k) | (x >> (64 - k)); }
    uint64_t s_[4];
    double spare_ = 0.0;
    bool have_spare_ = false;
};

}  // namespace permlab
