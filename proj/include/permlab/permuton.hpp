#pragma once

#include <cmath>
#include <cstdint>
#include <set>
#include <stdexcept>
#include <vector>

#include "permlab/gentree.hpp"
#include "permlab/parallel.hpp"
#include "permlab/permutation.hpp"
#include "permlab/rng.hpp"
#include "permlab/stats.hpp"

namespace permlab {

// k x k grid measure on the unit square with (approximately) uniform
// marginals. Cells are indexed (ix, iy) with ix along the first axis.
class EmpiricalPermuton {
public:
    explicit EmpiricalPermuton(int grid) : k_(grid), mass_(static_cast<size_t>(grid) * grid, 0.0) {
        if (grid < 1) throw std::invalid_argument("permuton: grid must be >= 1");
    }

    // Mass 1/n at the cell containing ((i-1/2)/n, (sigma(i)-1/2)/n).
    static EmpiricalPermuton of(const Permutation& sigma, int grid) {
        EmpiricalPermuton e(grid);
        int n = sigma.size();
        double w = 1.0 / n;
        for (int i = 1; i <= n; ++i) {
            int ix = cell_of(i, n, grid);
            int iy = cell_of(sigma(i), n, grid);
            e.at(ix, iy) += w;
        }
        return e;
    }

    int grid() const { return k_; }
    double& at(int ix, int iy) { return mass_[static_cast<size_t>(ix) * k_ + iy]; }
    double at(int ix, int iy) const { return mass_[static_cast<size_t>(ix) * k_ + iy]; }
    const std::vector<double>& data() const { return mass_; }

    double total() const {
        double s = 0;
        for (double m : mass_) s += m;
        return s;
    }

    std::vector<double> column_sums() const {  // marginal along the first axis
        std::vector<double> s(k_, 0.0);
        for (int ix = 0; ix < k_; ++ix)
            for (int iy = 0; iy < k_; ++iy) s[ix] += at(ix, iy);
        return s;
    }

    std::vector<double> row_sums() const {
        std::vector<double> s(k_, 0.0);
        for (int ix = 0; ix < k_; ++ix)
            for (int iy = 0; iy < k_; ++iy) s[iy] += at(ix, iy);
        return s;
    }

    double max_marginal_deviation() const {
        double dev = 0, want = 1.0 / k_;
        for (double s : column_sums()) dev = std::max(dev, std::fabs(s - want));
        for (double s : row_sums()) dev = std::max(dev, std::fabs(s - want));
        return dev;
    }

    void add_scaled(const EmpiricalPermuton& o, double w) {
        if (o.k_ != k_) throw std::invalid_argument("permuton: grid mismatch");
        for (size_t i = 0; i < mass_.size(); ++i) mass_[i] += w * o.mass_[i];
    }

private:
    static int cell_of(int v, int n, int grid) {
        double x = (v - 0.5) / n;
        int c = static_cast<int>(x * grid);
        return c >= grid ? grid - 1 : c;
    }

    int k_;
    std::vector<double> mass_;
};

// Rectangle distance over grid-corner rectangles, via 2D prefix sums. For
// measures living on the grid this reaches the sup up to discretization.
inline double rect_distance(const EmpiricalPermuton& a, const EmpiricalPermuton& b) {
    if (a.grid() != b.grid()) throw std::invalid_argument("rect_distance: grid mismatch");
    int k = a.grid();
    std::vector<double> d(static_cast<size_t>(k + 1) * (k + 1), 0.0);
    auto ref = [&](int x, int y) -> double& { return d[static_cast<size_t>(x) * (k + 1) + y]; };
    for (int x = 1; x <= k; ++x)
        for (int y = 1; y <= k; ++y)
            ref(x, y) = (a.at(x - 1, y - 1) - b.at(x - 1, y - 1)) + ref(x - 1, y) + ref(x, y - 1) -
                        ref(x - 1, y - 1);
    double best = 0;
    for (int x1 = 0; x1 <= k; ++x1)
        for (int x2 = x1 + 1; x2 <= k; ++x2)
            for (int y1 = 0; y1 <= k; ++y1)
                for (int y2 = y1 + 1; y2 <= k; ++y2) {
                    double v = ref(x2, y2) - ref(x1, y2) - ref(x2, y1) + ref(x1, y1);
                    if (v < 0) v = -v;
                    if (v > best) best = v;
                }
    return best;
}

// Pattern of k i.i.d. points of the grid measure after x-reordering. Within a
// cell the mass sits on the cell diagonal, so patterns at grid scale are the
// patterns of cell centers (two points of one cell never invert).
inline Permutation sample_pattern(const EmpiricalPermuton& mu, int k, Rng& rng) {
    if (k < 1) throw std::invalid_argument("sample_pattern: k must be >= 1");
    int g = mu.grid();
    std::vector<double> cdf(mu.data().begin(), mu.data().end());
    for (size_t i = 1; i < cdf.size(); ++i) cdf[i] += cdf[i - 1];
    double total = cdf.back();
    std::vector<std::pair<double, double>> pts(k);
    for (int i = 0; i < k; ++i) {
        double u = rng.uniform() * total;
        size_t lo = 0, hi = cdf.size() - 1;
        while (lo < hi) {
            size_t mid = (lo + hi) / 2;
            if (u < cdf[mid])
                hi = mid;
            else
                lo = mid + 1;
        }
        int ix = static_cast<int>(lo) / g, iy = static_cast<int>(lo) % g;
        double jitter = rng.uniform();
        pts[i] = {(ix + jitter) / g, (iy + jitter) / g};
    }
    std::sort(pts.begin(), pts.end());
    std::vector<double> ys(k);
    for (int i = 0; i < k; ++i) ys[i] = pts[i].second;
    return standardize(ys);
}

// Pattern of k uniform indices into sigma; collisions are resampled.
inline Permutation sample_pattern(const Permutation& sigma, int k, Rng& rng) {
    int n = sigma.size();
    if (k < 1 || k > n) throw std::invalid_argument("sample_pattern: need 1 <= k <= n");
    std::vector<int> I(k);
    for (;;) {
        std::set<int> seen;
        bool clash = false;
        for (int i = 0; i < k; ++i) {
            I[i] = 1 + static_cast<int>(rng.below(n));
            if (!seen.insert(I[i]).second) clash = true;
        }
        if (!clash) break;
    }
    return pattern_at(sigma, I);
}

// ---------------------------------------------------------------------------
// Class-sampler statistics
// ---------------------------------------------------------------------------

struct DensityEstimate {
    double density = 0;
    double ci99 = 0;
    int64_t reps = 0;
    int draws_per_rep = 0;
};

// Probability that k uniform positions of a uniform size-n member induce the
// given pattern, averaged over sampled members.
inline DensityEstimate pattern_density(Family f, const Permutation& pattern, int n, int reps, uint64_t seed,
                                       int draws_per_rep = 32, SamplerOptions opt = {}) {
    ExactSampler sampler(f, n, opt);
    int k = pattern.size();
    std::vector<double> per_rep(reps);
    parallel_for(reps, [&](int64_t i) {
        Rng rng(derive_seed(seed, static_cast<uint64_t>(i)));
        Permutation sigma = walk_to_perm(sampler.sample(rng), f);
        int hits = 0;
        for (int d = 0; d < draws_per_rep; ++d)
            if (sample_pattern(sigma, k, rng) == pattern) ++hits;
        per_rep[i] = static_cast<double>(hits) / draws_per_rep;
    });
    MeanCi m = mean_ci(per_rep);
    return {m.mean, m.ci99, reps, draws_per_rep};
}

// Average of empirical permutons of sampled members, plus equal-size batch
// averages for jackknife error bars.
struct AveragedPermuton {
    EmpiricalPermuton mean;
    std::vector<EmpiricalPermuton> batches;

    EmpiricalPermuton leave_out(size_t skip) const {
        EmpiricalPermuton out(mean.grid());
        int used = 0;
        for (size_t b = 0; b < batches.size(); ++b) {
            if (b == skip) continue;
            out.add_scaled(batches[b], 1.0);
            ++used;
        }
        EmpiricalPermuton scaled(mean.grid());
        scaled.add_scaled(out, 1.0 / used);
        return scaled;
    }
};

inline AveragedPermuton averaged_permuton(Family f, int n, int reps, int grid, uint64_t seed,
                                          int batches = 8, SamplerOptions opt = {}) {
    ExactSampler sampler(f, n, opt);
    std::vector<EmpiricalPermuton> per_rep;
    per_rep.reserve(reps);
    for (int i = 0; i < reps; ++i) per_rep.push_back(EmpiricalPermuton(grid));
    parallel_for(reps, [&](int64_t i) {
        Rng rng(derive_seed(seed, static_cast<uint64_t>(i)));
        Permutation sigma = walk_to_perm(sampler.sample(rng), f);
        per_rep[i] = EmpiricalPermuton::of(sigma, grid);
    });
    AveragedPermuton out{EmpiricalPermuton(grid), {}};
    for (int b = 0; b < batches; ++b) out.batches.push_back(EmpiricalPermuton(grid));
    for (int i = 0; i < reps; ++i) {
        out.mean.add_scaled(per_rep[i], 1.0 / reps);
        int b = i % batches;
        out.batches[b].add_scaled(per_rep[i], static_cast<double>(batches) / reps);
    }
    return out;
}

struct ConvergenceRow {
    int n_small = 0, n_big = 0;
    double d = 0;
    double d_sd = 0;  // jackknife over batches
};

struct ConvergenceDiag {
    std::vector<int> sizes;
    std::vector<ConvergenceRow> rows;
};

// Rectangle distances between averaged empirical permutons of consecutive
// sizes. The distances should shrink as sizes grow.
inline ConvergenceDiag convergence_diagnostic(Family f, const std::vector<int>& sizes, int reps, int grid,
                                              uint64_t seed, SamplerOptions opt = {}) {
    if (sizes.size() < 2) throw std::invalid_argument("convergence_diagnostic: need at least two sizes");
    ConvergenceDiag diag;
    diag.sizes = sizes;
    std::vector<AveragedPermuton> avgs;
    avgs.reserve(sizes.size());
    for (size_t i = 0; i < sizes.size(); ++i)
        avgs.push_back(averaged_permuton(f, sizes[i], reps, grid, derive_seed(seed, i), 8, opt));
    for (size_t i = 0; i + 1 < sizes.size(); ++i) {
        ConvergenceRow row;
        row.n_small = sizes[i];
        row.n_big = sizes[i + 1];
        row.d = rect_distance(avgs[i].mean, avgs[i + 1].mean);
        size_t nb = avgs[i].batches.size();
        std::vector<double> jack(nb);
        double jbar = 0;
        for (size_t b = 0; b < nb; ++b) {
            jack[b] = rect_distance(avgs[i].leave_out(b), avgs[i + 1].leave_out(b));
            jbar += jack[b] / nb;
        }
        double var = 0;
        for (double jv : jack) var += (jv - jbar) * (jv - jbar);
        row.d_sd = std::sqrt(var * (nb - 1) / nb);
        diag.rows.push_back(row);
    }
    return diag;
}

}  // namespace permlab
