#pragma once

#include <atomic>
#include <cmath>
#include <cstdint>
#include <stdexcept>
#include <vector>

#include "permlab/coalescent.hpp"
#include "permlab/parallel.hpp"
#include "permlab/rng.hpp"
#include "permlab/stats.hpp"
#include "permlab/walks.hpp"

namespace permlab {

// ---------------------------------------------------------------------------
// Rescaled paths of unconditioned runs
// ---------------------------------------------------------------------------

struct RescaledPath {
    std::vector<double> times;
    std::vector<double> values;

    double value_at(double t) const {
        if (times.empty()) return 0;
        if (t <= times.front()) return values.front();
        if (t >= times.back()) return values.back();
        size_t lo = 0, hi = times.size() - 1;
        while (lo + 1 < hi) {
            size_t mid = (lo + hi) / 2;
            if (times[mid] <= t)
                lo = mid;
            else
                hi = mid;
        }
        double w = (t - times[lo]) / (times[hi] - times[lo]);
        return values[lo] + w * (values[hi] - values[lo]);
    }
};

struct UnconditionedRun {
    RescaledPath wx, wy, z;
};

// Scale a trajectory value: positive side by the y-marginal sd, negative side
// by the x-marginal sd (each side then diffuses at unit rate).
inline double scale_trajectory(int z, int n, const Params& p) {
    double root = std::sqrt(static_cast<double>(n));
    return z >= 0 ? z / (p.sigmap * root) : z / (p.sigma * root);
}

// One unconditioned window: n i.i.d. steps, one trajectory opened at ceil(nu),
// everything rescaled diffusively onto [0,1].
inline UnconditionedRun run_unconditioned(int n, Family f, double u, uint64_t seed) {
    if (u < 0 || u >= 1) throw std::invalid_argument("run_unconditioned: u must be in [0,1)");
    Params p = params_of(f);
    StepDistribution mu(f, false);
    Rng rng(seed);
    int start = static_cast<int>(std::ceil(n * u));
    double root = std::sqrt(static_cast<double>(n));
    UnconditionedRun out;
    out.wx.times.reserve(n + 1);
    long long X = 0, Y = 0;
    int z = 0;
    for (int k = 0; k <= n; ++k) {
        if (k > 0) {
            Pt d = mu.sample(rng);
            X += d.x;
            Y += d.y;
            if (k > start) z = trajectory_step(f, z, d);
        }
        double t = static_cast<double>(k) / n;
        out.wx.times.push_back(t);
        out.wx.values.push_back(X / (p.sigma * root));
        out.wy.times.push_back(t);
        out.wy.values.push_back(Y / (p.sigmap * root));
        out.z.times.push_back(t);
        out.z.values.push_back(k <= start ? 0.0 : scale_trajectory(z, n, p));
    }
    return out;
}

// ---------------------------------------------------------------------------
// Skew parameter measurements
// ---------------------------------------------------------------------------

// Scaled trajectory endpoints Z-bar(t) over independent runs of floor(n*t)
// steps each. One derived seed per replicate.
inline std::vector<double> skewness_samples(int n, Family f, int reps, double t, uint64_t seed) {
    Params p = params_of(f);
    StepDistribution mu(f, false);
    std::vector<double> out(reps);
    int m = static_cast<int>(n * t);
    parallel_for(reps, [&](int64_t i) {
        Rng rng(derive_seed(seed, static_cast<uint64_t>(i)));
        int z = 0;
        for (int k = 0; k < m; ++k) z = trajectory_step(f, z, mu.sample(rng));
        out[i] = scale_trajectory(z, n, p);
    });
    return out;
}

struct SkewnessEstimate {
    double estimate = 0;
    double ci99 = 0;
    int64_t reps = 0;
    double t = 0;
};

// Fraction of runs whose trajectory is strictly positive at time t; for the
// limiting process this fraction is the skew parameter q at every t > 0.
inline SkewnessEstimate empirical_skewness(int n, Family f, int reps, double t, uint64_t seed) {
    if (reps < 100) throw std::invalid_argument("empirical_skewness: reps must be >= 100");
    std::vector<double> zs = skewness_samples(n, f, reps, t, seed);
    int64_t pos = 0;
    for (double z : zs)
        if (z > 0) ++pos;
    SkewnessEstimate e;
    e.reps = reps;
    e.t = t;
    e.estimate = static_cast<double>(pos) / reps;
    e.ci99 = proportion_ci99(e.estimate, reps);
    return e;
}

// Reference draws from the limit marginal: |N(0,t)| flipped positive with
// probability q. Used as the two-sample KS reference.
inline std::vector<double> skew_bm_reference(double q, double t, int64_t samples, uint64_t seed) {
    if (q <= 0 || q >= 1) throw std::invalid_argument("skew_bm_reference: q must be in (0,1)");
    std::vector<double> out(samples);
    double root = std::sqrt(t);
    parallel_for(samples, [&](int64_t i) {
        Rng rng(derive_seed(seed, static_cast<uint64_t>(i)));
        double mag = std::fabs(rng.gaussian()) * root;
        out[i] = rng.uniform() < q ? mag : -mag;
    });
    return out;
}

// ---------------------------------------------------------------------------
// Ladder heights
// ---------------------------------------------------------------------------

enum class Component { x, y };

// Geometric ratio of the negative steps of the chosen marginal.
inline double ladder_ratio(Family f, Component c) {
    Params p = params_of(f);
    if (f == Family::strong) return c == Component::y ? p.theta : p.gamma;
    return p.gamma;
}

struct LadderResult {
    std::vector<int64_t> hist;  // hist[i] = #{samples with S_tau = -(i+1)}
    double mean_abs = 0;        // empirical E[-S_tau]
    int64_t samples = 0;
    int64_t censored = 0;  // runs restarted after the step cap (heavy-tailed entry time)
    double ratio = 0;      // geometric ratio the ladder law should follow
};

// First entry of the chosen marginal into the negative half-line; the landing
// depth follows a geometric law because the negative jumps are geometric.
inline LadderResult ladder_height_check(Family f, Component comp, int64_t samples, uint64_t seed,
                                        int64_t step_cap = 100000) {
    LadderResult r;
    r.ratio = ladder_ratio(f, comp);
    r.samples = samples;
    std::vector<int32_t> depth(samples);
    std::atomic<int64_t> censored{0};
    StepDistribution mu(f, false);
    parallel_for(samples, [&](int64_t i) {
        Rng rng(derive_seed(seed, static_cast<uint64_t>(i)));
        for (;;) {
            long long s = 0;
            bool done = false;
            for (int64_t k = 0; k < step_cap; ++k) {
                Pt d = mu.sample(rng);
                s += comp == Component::x ? d.x : d.y;
                if (s < 0) {
                    depth[i] = static_cast<int32_t>(-s);
                    done = true;
                    break;
                }
            }
            if (done) break;
            censored.fetch_add(1);  // overshoot is independent of the entry time; redraw
        }
    });
    r.censored = censored.load();
    int32_t mx = 1;
    for (auto d : depth) mx = std::max(mx, d);
    r.hist.assign(mx, 0);
    double sum = 0;
    for (auto d : depth) {
        r.hist[d - 1]++;
        sum += d;
    }
    r.mean_abs = sum / static_cast<double>(samples);
    return r;
}

// Chi-square of a ladder histogram against P(depth = k) = (1-ratio) ratio^(k-1).
inline ChiSquareResult ladder_chi_square(const LadderResult& r) {
    std::vector<double> probs(r.hist.size());
    for (size_t k = 0; k < probs.size(); ++k) probs[k] = (1 - r.ratio) * std::pow(r.ratio, k);
    double rest = 1.0;
    for (double p : probs) rest -= p;
    probs.back() += rest;  // fold the tail into the last cell
    return chi_square_gof(r.hist, probs);
}

// ---------------------------------------------------------------------------
// Renewal function of the ascending ladder chain (semi family)
// ---------------------------------------------------------------------------

struct RenewalEstimate {
    int x = 0;  // negative argument
    double estimate = 0;
    double ci99 = 0;
};

// Monte Carlo of h'(x) = 1 + sum_j P(T_j < -x), T_j partial sums of i.i.d.
// ascending ladder heights of the reversed x marginal; equivalently the
// expected number of renewal points in [0, -x-1]. Ladder heights are drawn by
// simulating the actual walk to its first strictly positive value.
inline std::vector<RenewalEstimate> renewal_function_check(int64_t samples, uint64_t seed, int xmin = -8,
                                                           int64_t step_cap = 100000) {
    const int depth = -xmin;
    std::vector<int32_t> counts(static_cast<size_t>(samples) * depth);
    StepDistribution mu(Family::semi, false);
    parallel_for(samples, [&](int64_t i) {
        Rng rng(derive_seed(seed, static_cast<uint64_t>(i)));
        // renewal points strictly below depth-1 ... accumulate partial sums
        long long t_sum = 0;
        std::vector<int32_t> cnt(depth, 0);
        while (t_sum <= depth - 1) {
            for (int x = 1; x <= depth; ++x)
                if (t_sum < x) cnt[x - 1]++;
            // next ascending ladder height of -X
            long long s = 0;
            bool done = false;
            while (!done) {
                for (int64_t k = 0; k < step_cap; ++k) {
                    Pt d = mu.sample(rng);
                    s -= d.x;
                    if (s > 0) {
                        done = true;
                        break;
                    }
                }
                if (!done) s = 0;  // censored entry time; height law unaffected, redraw
            }
            t_sum += s;
        }
        for (int x = 0; x < depth; ++x) counts[static_cast<size_t>(i) * depth + x] = cnt[x];
    });
    std::vector<RenewalEstimate> out(depth);
    for (int x = 0; x < depth; ++x) {
        std::vector<double> vals(samples);
        for (int64_t i = 0; i < samples; ++i) vals[i] = counts[static_cast<size_t>(i) * depth + x];
        MeanCi m = mean_ci(vals);
        out[x] = {-(x + 1), m.mean, m.ci99};
    }
    return out;
}

// Closed form the estimates are checked against: gamma + (1-gamma)(-x), x < 0.
inline double renewal_closed_form(int x) {
    if (x >= 0) return 0.0;
    double g = params_semi().gamma;
    return g + (1 - g) * static_cast<double>(-x);
}

// ---------------------------------------------------------------------------
// Zero-return times of the strong trajectory
// ---------------------------------------------------------------------------

struct TailEstimate {
    int kmin = 0, kmax = 0;
    int64_t samples = 0;
    std::vector<double> scaled;          // k^{3/2} P(first return = k), k = kmin..kmax
    double average = 0;                  // window average, compared to beta
    std::vector<double> renewal_scaled;  // 2 pi sqrt(k) P(Z_k = 0), window average below
    double renewal_average = 0;
};

// First-return and renewal statistics of the trajectory opened at 0. The
// trajectory returns to 0 with a k^{-3/2} tail whose constant is beta, and
// P(Z_k = 0) decays like 1/(2 pi beta sqrt(k)).
inline TailEstimate return_time_tail(Family f, int kmin, int kmax, int64_t samples, uint64_t seed) {
    if (f != Family::strong)
        throw std::invalid_argument("return_time_tail: the zero-return constant is defined for the strong family");
    if (kmin < 1 || kmax < kmin) throw std::invalid_argument("return_time_tail: bad window");
    std::vector<std::atomic<int64_t>> first_ret(kmax + 1);
    std::vector<std::atomic<int64_t>> at_zero(kmax + 1);
    for (auto& a : first_ret) a.store(0);
    for (auto& a : at_zero) a.store(0);
    StepDistribution mu(f, false);
    parallel_for(samples, [&](int64_t i) {
        Rng rng(derive_seed(seed, static_cast<uint64_t>(i)));
        int z = 0;
        int first = 0;
        for (int k = 1; k <= kmax; ++k) {
            z = trajectory_step(f, z, mu.sample(rng));
            if (z == 0) {
                at_zero[k].fetch_add(1);
                if (first == 0) first = k;
            }
        }
        if (first > 0) first_ret[first].fetch_add(1);
    });
    TailEstimate e;
    e.kmin = kmin;
    e.kmax = kmax;
    e.samples = samples;
    const double two_pi = 6.283185307179586476925286766559;
    double acc = 0, racc = 0;
    for (int k = kmin; k <= kmax; ++k) {
        double pk = static_cast<double>(first_ret[k].load()) / samples;
        double zk = static_cast<double>(at_zero[k].load()) / samples;
        e.scaled.push_back(std::pow(static_cast<double>(k), 1.5) * pk);
        e.renewal_scaled.push_back(two_pi * std::sqrt(static_cast<double>(k)) * zk);
        acc += e.scaled.back();
        racc += e.renewal_scaled.back();
    }
    e.average = acc / static_cast<double>(kmax - kmin + 1);
    e.renewal_average = racc / static_cast<double>(kmax - kmin + 1);
    return e;
}

}  // namespace permlab
