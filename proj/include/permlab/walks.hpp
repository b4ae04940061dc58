#pragma once

#include <array>
#include <cmath>
#include <cstdint>
#include <limits>
#include <stdexcept>
#include <string>
#include <vector>

#include "permlab/gentree.hpp"
#include "permlab/permutation.hpp"
#include "permlab/rng.hpp"

namespace permlab {

// ---------------------------------------------------------------------------
// Solved step-distribution parameters
// ---------------------------------------------------------------------------

struct Params {
    Family family;
    double alpha = 0, gamma = 0, theta = std::numeric_limits<double>::quiet_NaN();
    double sigma2 = 0, sigma = 0;     // variance / sd of the x marginal
    double sigma2p = 0, sigmap = 0;   // variance / sd of the y marginal
    double cov_xy = 0;
    double rho = 0;
    double q = 0;
    double beta = std::numeric_limits<double>::quiet_NaN();  // zero-return tail constant (strong)
    std::array<double, 3> system_residuals{0, 0, 0};
    double gamma_poly = 0, rho_poly = 0, q_poly = 0;  // residuals of the defining cubics
};

namespace detail {

// Bisection to ~1e-14 and two Newton polishes; the bracket must straddle a root.
template <class F, class DF>
double solve_root(F f, DF df, double lo, double hi) {
    double flo = f(lo);
    if (flo == 0) return lo;
    for (int it = 0; it < 100; ++it) {
        double mid = 0.5 * (lo + hi);
        double fm = f(mid);
        if (fm == 0) {
            lo = hi = mid;
            break;
        }
        if ((fm < 0) == (flo < 0)) {
            lo = mid;
            flo = fm;
        } else {
            hi = mid;
        }
    }
    double x = 0.5 * (lo + hi);
    for (int it = 0; it < 2; ++it) x -= f(x) / df(x);
    return x;
}

}  // namespace detail

// Parameters of the centered strong-family step measure. gamma solves
// -1 + 2g - g^2 + g^3 = 0; theta and alpha follow from the closed system, so
// its residuals vanish to rounding. q solves -1 + 6q - 11q^2 + 7q^3 = 0 and is
// cross-checked against the sigma-ratio expression inherited from the
// zero-return analysis.
inline Params solve_params_strong() {
    Params p;
    p.family = Family::strong;
    auto f = [](double g) { return -1 + 2 * g - g * g + g * g * g; };
    auto df = [](double g) { return 2 - 2 * g + 3 * g * g; };
    double g = detail::solve_root(f, df, 0.0, 1.0);
    p.gamma = g;
    p.gamma_poly = f(g);
    double sq = std::sqrt(g);
    p.theta = sq / (1 + sq);
    double th = p.theta;
    p.alpha = 1.0 / (1.0 / th + g / (1 - g) + 1.0 / (g * (1 - th)));
    double a = p.alpha;
    p.system_residuals[0] = 1.0 / (g * (1 - th)) - g / ((1 - g) * (1 - g));
    p.system_residuals[1] = 1.0 / th - th / (g * (1 - th) * (1 - th));
    p.system_residuals[2] = a - 1.0 / (1.0 / th + g / (1 - g) + 1.0 / (g * (1 - th)));
    p.sigma2 = a * (1.0 / (g * (1 - th)) + g * (1 + g) / std::pow(1 - g, 3));
    p.sigma2p = a * (1.0 / th + th * (1 + th) / (g * std::pow(1 - th, 3)));
    p.sigma = std::sqrt(p.sigma2);
    p.sigmap = std::sqrt(p.sigma2p);
    p.cov_xy = -a * th / (g * (1 - th) * (1 - th));
    p.rho = p.cov_xy / (p.sigma * p.sigmap);
    p.rho_poly = 1 + 6 * p.rho + 8 * p.rho * p.rho + 8 * std::pow(p.rho, 3);
    auto fq = [](double q) { return -1 + 6 * q - 11 * q * q + 7 * q * q * q; };
    auto dfq = [](double q) { return 6 - 22 * q + 21 * q * q; };
    p.q = detail::solve_root(fq, dfq, 0.0, 1.0);
    p.q_poly = fq(p.q);
    double q_alt = 1.0 / (1.0 + (p.sigmap / p.sigma) * (th + g - g * th) / (g * (1 - g)));
    if (std::fabs(q_alt - p.q) > 1e-9)
        throw std::logic_error("strong params: q cross-check failed");
    p.beta = (1.0 / std::sqrt(2 * 3.14159265358979323846)) *
             ((1.0 / p.sigmap) * (a / th) / (1 - th) +
              (1.0 / p.sigma) * (a / th + (a / g) / (1 - th)) / (1 - g));
    return p;
}

// Closed forms for the semi family.
inline Params params_semi() {
    Params p;
    p.family = Family::semi;
    const double r5 = std::sqrt(5.0);
    p.alpha = r5 - 2;
    p.gamma = (r5 - 1) / 2;
    p.sigma2 = 2 * (2 + r5);
    p.sigma2p = 1 + r5;
    p.sigma = std::sqrt(p.sigma2);
    p.sigmap = std::sqrt(p.sigma2p);
    p.cov_xy = -(2 + r5);
    p.rho = -(1 + r5) / 4;
    p.q = 0.5;
    p.gamma_poly = p.gamma * p.gamma + p.gamma - 1;  // golden-ratio identity
    p.rho_poly = p.cov_xy / (p.sigma * p.sigmap) - p.rho;
    p.q_poly = 0;
    return p;
}

inline Params params_of(Family f) { return f == Family::strong ? solve_params_strong() : params_semi(); }

// ---------------------------------------------------------------------------
// Step distributions
// ---------------------------------------------------------------------------

// One geometric family of atoms: atom i (i >= i0) has weight w * r^i and
// increment (ax + bx*i, ay + by*i). r = 0 encodes a single atom at i0 = 0.
struct AtomFamily {
    double w = 0, r = 0;
    int i0 = 0;
    int ax = 0, bx = 0, ay = 0, by = 0;
};

struct MeasureDiagnostics {
    double mass = 0;
    double mean_x = 0, mean_y = 0;
    double var_x = 0, var_y = 0, cov_xy = 0;
    double corr = 0;
};

// A step measure made of geometric atom families; covers both families and
// their time-reversed versions.
class StepDistribution {
public:
    StepDistribution(Family fam, bool reversed) : family_(fam), reversed_(reversed) {
        Params p = params_of(fam);
        if (fam == Family::strong) {
            fams_.push_back({p.alpha, p.gamma, 1, 0, -1, 0, 0});        // (-i, 0), i >= 1
            fams_.push_back({p.alpha / p.theta, 0.0, 0, 0, 0, 1, 0});   // (0, 1)
            fams_.push_back({p.alpha / p.gamma, p.theta, 0, 1, 0, 0, -1});  // (1, -i), i >= 0
        } else {
            fams_.push_back({p.alpha, p.gamma, 0, 0, -1, 1, 0});        // (-i, 1), i >= 0
            fams_.push_back({p.alpha, p.gamma, 1, 0, 1, 1, -1});        // (i, 1-i), i >= 1
        }
        if (reversed) {
            for (auto& f : fams_) {
                f.ax = -f.ax;
                f.bx = -f.bx;
                f.ay = -f.ay;
                f.by = -f.by;
            }
        }
        cum_.resize(fams_.size());
        double acc = 0;
        for (size_t i = 0; i < fams_.size(); ++i) {
            acc += family_mass(fams_[i]);
            cum_[i] = acc;
        }
    }

    Family family() const { return family_; }
    bool reversed() const { return reversed_; }
    const std::vector<AtomFamily>& atom_families() const { return fams_; }

    // Exact atom weight of a given increment, 0 if it is not an atom.
    double weight_of(Pt inc) const {
        for (const auto& f : fams_) {
            if (f.bx == 0 && f.by == 0) {
                if (inc.x == f.ax && inc.y == f.ay) return f.w * std::pow(f.r == 0 ? 1 : f.r, f.i0);
                continue;
            }
            // solve ax + bx*i = inc.x, ay + by*i = inc.y for integer i >= i0
            long long i;
            if (f.bx != 0) {
                if ((inc.x - f.ax) % f.bx != 0) continue;
                i = (inc.x - f.ax) / f.bx;
            } else {
                if ((inc.y - f.ay) % f.by != 0) continue;
                i = (inc.y - f.ay) / f.by;
            }
            if (i < f.i0) continue;
            if (f.ax + f.bx * i != inc.x || f.ay + f.by * i != inc.y) continue;
            return f.w * std::pow(f.r, static_cast<double>(i));
        }
        return 0.0;
    }

    // Closed-form mass, mean, covariance and correlation.
    MeasureDiagnostics diagnostics() const {
        MeasureDiagnostics d;
        double ex2 = 0, ey2 = 0, exy = 0;
        for (const auto& f : fams_) {
            double s0 = series0(f), s1 = series1(f), s2 = series2(f);
            d.mass += f.w * s0;
            d.mean_x += f.w * (f.ax * s0 + f.bx * s1);
            d.mean_y += f.w * (f.ay * s0 + f.by * s1);
            ex2 += f.w * (f.ax * f.ax * s0 + 2.0 * f.ax * f.bx * s1 + f.bx * f.bx * s2);
            ey2 += f.w * (f.ay * f.ay * s0 + 2.0 * f.ay * f.by * s1 + f.by * f.by * s2);
            exy += f.w * (f.ax * f.ay * s0 + (f.ax * f.by + f.ay * f.bx) * s1 + f.bx * f.by * s2);
        }
        d.var_x = ex2 - d.mean_x * d.mean_x;
        d.var_y = ey2 - d.mean_y * d.mean_y;
        d.cov_xy = exy - d.mean_x * d.mean_y;
        d.corr = d.cov_xy / std::sqrt(d.var_x * d.var_y);
        return d;
    }

    // Exact draw: pick the atom family by closed-form mass, then draw the
    // geometric index by inverse CDF. No tail truncation.
    Pt sample(Rng& rng) const {
        double u = rng.uniform() * cum_.back();
        size_t fi = 0;
        while (fi + 1 < cum_.size() && u >= cum_[fi]) ++fi;
        const AtomFamily& f = fams_[fi];
        int64_t i = f.i0 + (f.r > 0 ? rng.geometric(f.r) : 0);
        return Pt{static_cast<int>(f.ax + f.bx * i), static_cast<int>(f.ay + f.by * i)};
    }

private:
    static double series0(const AtomFamily& f) {
        if (f.r == 0) return f.i0 == 0 ? 1.0 : 0.0;
        return std::pow(f.r, f.i0) / (1 - f.r);
    }
    static double series1(const AtomFamily& f) {
        if (f.r == 0) return 0.0;
        return std::pow(f.r, f.i0) * (f.i0 * (1 - f.r) + f.r) / ((1 - f.r) * (1 - f.r));
    }
    static double series2(const AtomFamily& f) {
        if (f.r == 0) return 0.0;
        // sum_{i>=i0} i^2 r^i = full series minus the first i0 terms
        double full = f.r * (1 + f.r) / std::pow(1 - f.r, 3);
        for (int i = 0; i < f.i0; ++i) full -= static_cast<double>(i) * i * std::pow(f.r, i);
        return full;
    }
    static double family_mass(const AtomFamily& f) { return f.w * series0(f); }

    Family family_;
    bool reversed_;
    std::vector<AtomFamily> fams_;
    std::vector<double> cum_;
};

// ---------------------------------------------------------------------------
// Walk predicates
// ---------------------------------------------------------------------------

inline bool increment_allowed(Pt inc, Family f) {
    if (f == Family::strong)
        return (inc.x < 0 && inc.y == 0) || (inc.x == 0 && inc.y == 1) || (inc.x == 1 && inc.y <= 0);
    return (inc.x <= 0 && inc.y == 1) || (inc.x >= 1 && inc.y == 1 - inc.x);
}

// Member of the conditioned walk family: starts at the origin, stays in the
// non-negative quadrant, increments in the family set.
inline bool walk_validity(const Walk& w, Family f) {
    if (w.empty() || w[0] != Pt{0, 0}) return false;
    for (size_t i = 0; i < w.size(); ++i) {
        if (w[i].x < 0 || w[i].y < 0) return false;
        if (i > 0 && !increment_allowed({w[i].x - w[i - 1].x, w[i].y - w[i - 1].y}, f)) return false;
    }
    return true;
}

// ---------------------------------------------------------------------------
// Conditioned sampling by time reversal and rejection
// ---------------------------------------------------------------------------

// Start distribution of the reversed walk: weight gamma^h theta^l (strong) or
// gamma^(2l+h) (semi) on each label of tree level n. Weights are accumulated
// in log space; the level sets decay geometrically and would underflow
// otherwise.
class StartDistribution {
public:
    StartDistribution(Family fam, int n) : fam_(fam) {
        Params p = params_of(fam);
        for (const auto& [l, cnt] : labels_at_level(Rule::of(fam), n)) {
            (void)cnt;
            labels_.push_back(l);
            logw_.push_back(log_weight(l, p));
        }
        double mx = logw_[0];
        for (double lw : logw_) mx = std::max(mx, lw);
        cum_.resize(logw_.size());
        double acc = 0;
        for (size_t i = 0; i < logw_.size(); ++i) {
            acc += std::exp(logw_[i] - mx);
            cum_[i] = acc;
        }
        log_z_ = mx + std::log(acc);
    }

    double log_normalizer() const { return log_z_; }

    // Exact weight of one label, relative to the normalizer.
    double log_weight(Label l, const Params& p) const {
        if (fam_ == Family::strong) return l.x * std::log(p.gamma) + l.y * std::log(p.theta);
        return (2.0 * l.y + l.x) * std::log(p.gamma);
    }

    Label sample(Rng& rng) const {
        double u = rng.uniform() * cum_.back();
        size_t lo = 0, hi = cum_.size() - 1;
        while (lo < hi) {
            size_t mid = (lo + hi) / 2;
            if (u < cum_[mid])
                hi = mid;
            else
                lo = mid + 1;
        }
        return labels_[lo];
    }

    const std::vector<Label>& labels() const { return labels_; }

private:
    Family fam_;
    std::vector<Label> labels_;
    std::vector<double> logw_;
    std::vector<double> cum_;
    double log_z_ = 0;
};

struct RejectionExhausted : std::runtime_error {
    uint64_t attempts;
    explicit RejectionExhausted(uint64_t a)
        : std::runtime_error("rejection sampler: no acceptance within " + std::to_string(a) + " attempts"),
          attempts(a) {}
};

struct RejectionSample {
    Walk walk;
    uint64_t attempts = 0;
};

// Uniform conditioned walk: draw the reversed walk (start from the level-n
// label measure, then reversed steps), accept when it stays in the quadrant
// and lands on the origin, and return it time-reversed.
class RejectionSampler {
public:
    RejectionSampler(Family fam, int n, int budget = 200)
        : fam_(fam), n_(n), start_(fam, n), steps_(fam, /*reversed=*/true) {
        if (n < 1) throw std::invalid_argument("rejection sampler: n must be >= 1");
        if (n > budget)
            throw BudgetExceeded("rejection sampling at size " + std::to_string(n) +
                                 " exceeds the acceptance-rate budget (" + std::to_string(budget) + ")");
    }

    RejectionSample sample(Rng& rng, uint64_t max_attempts = 100000000ULL) const {
        std::vector<Pt> rev(n_);
        for (uint64_t attempt = 1; attempt <= max_attempts; ++attempt) {
            rev[0] = start_.sample(rng);
            bool ok = true;
            for (int i = 1; i < n_; ++i) {
                Pt d = steps_.sample(rng);
                rev[i] = {rev[i - 1].x + d.x, rev[i - 1].y + d.y};
                if (rev[i].x < 0 || rev[i].y < 0) {
                    ok = false;
                    break;
                }
            }
            if (!ok || rev[n_ - 1] != Pt{0, 0}) continue;
            Walk w(rev.rbegin(), rev.rend());
            total_attempts_ += attempt;
            total_accepts_ += 1;
            return {std::move(w), attempt};
        }
        throw RejectionExhausted(max_attempts);
    }

    double observed_acceptance_rate() const {
        return total_attempts_ ? static_cast<double>(total_accepts_) / static_cast<double>(total_attempts_) : 0.0;
    }

private:
    Family fam_;
    int n_;
    StartDistribution start_;
    StepDistribution steps_;
    mutable uint64_t total_attempts_ = 0;
    mutable uint64_t total_accepts_ = 0;
};

}  // namespace permlab
