#pragma once

#include <algorithm>
#include <atomic>
#include <cstdint>
#include <cstdlib>
#include <thread>
#include <vector>

namespace permlab {

// Thread cap: PERMUTON_LAB_THREADS when set, hardware concurrency otherwise.
inline int max_threads() {
    if (const char* env = std::getenv("PERMUTON_LAB_THREADS")) {
        int v = std::atoi(env);
        if (v >= 1) return v;
    }
    unsigned hc = std::thread::hardware_concurrency();
    return hc ? static_cast<int>(hc) : 1;
}

// Runs fn(i) for i in [0, n). Callers key randomness on i (derive_seed) and
// reduce through per-index slots or integer counters, so the schedule never
// changes results.
template <class F>
void parallel_for(int64_t n, F&& fn, int threads = 0) {
    if (threads <= 0) threads = max_threads();
    if (n < 2 || threads <= 1) {
        for (int64_t i = 0; i < n; ++i) fn(i);
        return;
    }
    threads = static_cast<int>(std::min<int64_t>(threads, n));
    std::atomic<int64_t> next{0};
    const int64_t chunk = std::max<int64_t>(1, n / (static_cast<int64_t>(threads) * 16));
    std::vector<std::thread> pool;
    pool.reserve(threads);
    for (int t = 0; t < threads; ++t) {
        pool.emplace_back([&] {
            for (;;) {
                int64_t lo = next.fetch_add(chunk);
                if (lo >= n) break;
                int64_t hi = std::min(n, lo + chunk);
                for (int64_t i = lo; i < hi; ++i) fn(i);
            }
        });
    }
    for (auto& th : pool) th.join();
}

}  // namespace permlab
