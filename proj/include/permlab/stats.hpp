#pragma once

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <stdexcept>
#include <vector>

namespace permlab {

// 99% two-sided normal quantile; stochastic acceptance bands use this.
inline constexpr double kZ99 = 2.5758293035489004;

inline double normal_cdf(double x) { return 0.5 * std::erfc(-x / 1.4142135623730951); }

namespace detail {

// Regularized incomplete gamma functions, series + continued fraction.
inline double gamma_p_series(double a, double x) {
    double ap = a, sum = 1.0 / a, del = sum;
    for (int i = 0; i < 500; ++i) {
        ap += 1.0;
        del *= x / ap;
        sum += del;
        if (std::fabs(del) < std::fabs(sum) * 1e-15) break;
    }
    return sum * std::exp(-x + a * std::log(x) - std::lgamma(a));
}

inline double gamma_q_contfrac(double a, double x) {
    const double tiny = 1e-300;
    double b = x + 1.0 - a, c = 1.0 / tiny, d = 1.0 / b, h = d;
    for (int i = 1; i < 500; ++i) {
        double an = -static_cast<double>(i) * (i - a);
        b += 2.0;
        d = an * d + b;
        if (std::fabs(d) < tiny) d = tiny;
        c = b + an / c;
        if (std::fabs(c) < tiny) c = tiny;
        d = 1.0 / d;
        double del = d * c;
        h *= del;
        if (std::fabs(del - 1.0) < 1e-15) break;
    }
    return std::exp(-x + a * std::log(x) - std::lgamma(a)) * h;
}

}  // namespace detail

// Q(a, x) = upper regularized incomplete gamma.
inline double regularized_gamma_q(double a, double x) {
    if (x < 0 || a <= 0) throw std::invalid_argument("regularized_gamma_q: bad arguments");
    if (x == 0) return 1.0;
    if (x < a + 1.0) return 1.0 - detail::gamma_p_series(a, x);
    return detail::gamma_q_contfrac(a, x);
}

// Survival function of the chi-square distribution.
inline double chi_square_pvalue(double stat, double dof) {
    if (stat <= 0) return 1.0;
    return regularized_gamma_q(dof / 2.0, stat / 2.0);
}

struct ChiSquareResult {
    double stat = 0;
    double dof = 0;
    double pvalue = 1;
};

// Goodness of fit of observed counts against cell probabilities.
// Cells with tiny expectation are pooled into their neighbor.
inline ChiSquareResult chi_square_gof(const std::vector<int64_t>& counts, const std::vector<double>& probs,
                                      double min_expected = 5.0) {
    if (counts.size() != probs.size() || counts.empty())
        throw std::invalid_argument("chi_square_gof: size mismatch");
    double total = 0;
    for (auto c : counts) total += static_cast<double>(c);
    std::vector<double> obs, exp;
    double o_acc = 0, e_acc = 0;
    for (size_t i = 0; i < counts.size(); ++i) {
        o_acc += static_cast<double>(counts[i]);
        e_acc += total * probs[i];
        if (e_acc >= min_expected) {
            obs.push_back(o_acc);
            exp.push_back(e_acc);
            o_acc = e_acc = 0;
        }
    }
    if (e_acc > 0) {
        if (exp.empty()) {
            obs.push_back(o_acc);
            exp.push_back(e_acc);
        } else {
            obs.back() += o_acc;
            exp.back() += e_acc;
        }
    }
    ChiSquareResult r;
    for (size_t i = 0; i < obs.size(); ++i) {
        double d = obs[i] - exp[i];
        r.stat += d * d / exp[i];
    }
    r.dof = static_cast<double>(obs.size()) - 1;
    r.pvalue = r.dof <= 0 ? 1.0 : chi_square_pvalue(r.stat, r.dof);
    return r;
}

// Two-sample chi-square homogeneity test on common cells.
inline ChiSquareResult chi_square_two_sample(const std::vector<int64_t>& a, const std::vector<int64_t>& b) {
    if (a.size() != b.size() || a.empty()) throw std::invalid_argument("chi_square_two_sample: size mismatch");
    double ka = 0, kb = 0;
    for (size_t i = 0; i < a.size(); ++i) {
        ka += static_cast<double>(a[i]);
        kb += static_cast<double>(b[i]);
    }
    double ra = std::sqrt(kb / ka), rb = std::sqrt(ka / kb);
    ChiSquareResult r;
    int cells = 0;
    for (size_t i = 0; i < a.size(); ++i) {
        double n = static_cast<double>(a[i] + b[i]);
        if (n == 0) continue;
        double d = ra * static_cast<double>(a[i]) - rb * static_cast<double>(b[i]);
        r.stat += d * d / n;
        ++cells;
    }
    r.dof = cells - 1;
    r.pvalue = r.dof <= 0 ? 1.0 : chi_square_pvalue(r.stat, r.dof);
    return r;
}

// Two-sample Kolmogorov-Smirnov distance (the statistic only).
inline double ks_two_sample(std::vector<double> a, std::vector<double> b) {
    if (a.empty() || b.empty()) throw std::invalid_argument("ks_two_sample: empty sample");
    std::sort(a.begin(), a.end());
    std::sort(b.begin(), b.end());
    size_t i = 0, j = 0;
    double d = 0;
    while (i < a.size() && j < b.size()) {
        double x = std::min(a[i], b[j]);
        while (i < a.size() && a[i] <= x) ++i;
        while (j < b.size() && b[j] <= x) ++j;
        d = std::max(d, std::fabs(static_cast<double>(i) / a.size() - static_cast<double>(j) / b.size()));
    }
    return d;
}

struct MeanCi {
    double mean = 0;
    double ci99 = 0;  // half width
    int64_t n = 0;
};

inline MeanCi mean_ci(const std::vector<double>& xs) {
    MeanCi m;
    m.n = static_cast<int64_t>(xs.size());
    if (m.n == 0) return m;
    double s = 0;
    for (double x : xs) s += x;
    m.mean = s / m.n;
    double v = 0;
    for (double x : xs) v += (x - m.mean) * (x - m.mean);
    v = m.n > 1 ? v / (m.n - 1) : 0;
    m.ci99 = kZ99 * std::sqrt(v / m.n);
    return m;
}

// 99% CI half-width of a binomial proportion.
inline double proportion_ci99(double p, int64_t n) {
    return kZ99 * std::sqrt(std::max(p * (1 - p), 1e-12) / static_cast<double>(n));
}

}  // namespace permlab
