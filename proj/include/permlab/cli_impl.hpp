#pragma once

#include <cmath>
#include <cstdint>
#include <iomanip>
#include <sstream>
#include <string>
#include <vector>

#include <CLI11.hpp>

#include "permlab/coalescent.hpp"
#include "permlab/gentree.hpp"
#include "permlab/io.hpp"
#include "permlab/limit_sim.hpp"
#include "permlab/permutation.hpp"
#include "permlab/permuton.hpp"
#include "permlab/stats.hpp"
#include "permlab/svg.hpp"
#include "permlab/walks.hpp"

namespace permlab {

namespace cli {

// Collects per-check lines; any failed check turns the command's exit into 1.
class Report {
public:
    explicit Report(std::ostream& out) : out_(out) {}

    void check(const std::string& name, double observed, double expected, double tol) {
        bool ok = std::fabs(observed - expected) <= tol;
        line(name, ok,
             "observed=" + fmt(observed) + " expected=" + fmt(expected) + " tol=" + fmt(tol));
    }

    void check_true(const std::string& name, bool ok, const std::string& detail = "") {
        line(name, ok, detail);
    }

    void check_pvalue(const std::string& name, double pvalue, double threshold = 0.01) {
        line(name, pvalue > threshold, "p=" + fmt(pvalue) + " threshold=" + fmt(threshold));
    }

    void note(const std::string& text) { out_ << "    " << text << "\n"; }

    int exit_code() const { return failures_ == 0 ? 0 : 1; }
    int failures() const { return failures_; }

private:
    static std::string fmt(double v) {
        std::ostringstream os;
        os << std::setprecision(10) << v;
        return os.str();
    }

    void line(const std::string& name, bool ok, const std::string& detail) {
        if (!ok) ++failures_;
        out_ << (ok ? "  [pass] " : "  [FAIL] ") << name;
        if (!detail.empty()) out_ << "  (" << detail << ")";
        out_ << "\n";
    }

    std::ostream& out_;
    int failures_ = 0;
};

inline void print_params(std::ostream& out, const Params& p, bool machine) {
    auto kv = [&](const std::string& k, double v) {
        if (machine)
            out << k << "=" << std::setprecision(17) << v << "\n";
        else
            out << "  " << std::left << std::setw(18) << k << std::setprecision(12) << v << "\n";
    };
    if (!machine) out << "parameters (" << family_name(p.family) << "):\n";
    kv("alpha", p.alpha);
    kv("gamma", p.gamma);
    if (p.family == Family::strong) kv("theta", p.theta);
    kv("sigma2_x", p.sigma2);
    kv("sigma_x", p.sigma);
    kv("sigma2_y", p.sigma2p);
    kv("sigma_y", p.sigmap);
    kv("cov_xy", p.cov_xy);
    kv("rho", p.rho);
    kv("q", p.q);
    if (p.family == Family::strong) kv("beta", p.beta);
    kv("residual_mass_eq", p.system_residuals[0]);
    kv("residual_mean_eq", p.system_residuals[1]);
    kv("residual_norm_eq", p.system_residuals[2]);
    kv("residual_gamma_poly", p.gamma_poly);
    kv("residual_rho_poly", p.rho_poly);
    kv("residual_q_poly", p.q_poly);
}

inline int cmd_params(std::ostream& out, const std::string& family, bool machine) {
    print_params(out, params_of(parse_family(family)), machine);
    return 0;
}

inline int cmd_enumerate(std::ostream& out, const std::string& family, int nmax, bool brute) {
    Family f = parse_family(family);
    out << "n,count" << (brute ? ",brute" : "") << "\n";
    bool mismatch = false;
    for (int n = 1; n <= nmax; ++n) {
        BigUint c = count_members(f, n);
        out << n << "," << c.to_string();
        if (brute) {
            uint64_t b = count_members_brute(PermClass::of(f), n);
            out << "," << b;
            if (!(c == BigUint(b))) mismatch = true;
        }
        out << "\n";
    }
    if (mismatch) {
        out << "MISMATCH between tree counts and brute-force counts\n";
        return 1;
    }
    return 0;
}

inline int cmd_sample(std::ostream& out, const std::string& family, int n, int count,
                      const std::string& method, uint64_t seed, const std::string& out_path,
                      const std::string& kind, int budget) {
    Family f = parse_family(family);
    std::vector<Walk> walks;
    walks.reserve(count);
    Rng rng(seed);
    if (method == "exact") {
        SamplerOptions opt;
        if (budget > 0) opt.budget = budget;
        ExactSampler s(f, n, opt);
        for (int i = 0; i < count; ++i) walks.push_back(s.sample(rng));
    } else if (method == "rejection") {
        RejectionSampler s(f, n, budget > 0 ? budget : 200);
        uint64_t attempts = 0;
        for (int i = 0; i < count; ++i) {
            RejectionSample r = s.sample(rng);
            attempts += r.attempts;
            walks.push_back(std::move(r.walk));
        }
        out << "acceptance_rate=" << std::setprecision(6)
            << static_cast<double>(count) / static_cast<double>(attempts) << " attempts=" << attempts << "\n";
    } else {
        throw CLI::ValidationError("method", "method must be exact or rejection");
    }
    Envelope env;
    env.family = family;
    env.kind = kind;
    if (kind == "permutation") {
        std::vector<Permutation> ps;
        ps.reserve(walks.size());
        for (const auto& w : walks) ps.push_back(walk_to_perm(w, f));
        env.data = perms_to_json(ps);
    } else if (kind == "walk" || kind == "labels") {
        env.data = walks_to_json(walks);
    } else {
        throw CLI::ValidationError("kind", "kind must be permutation, walk or labels");
    }
    write_envelope(out_path, env);
    out << "wrote " << count << " " << kind << "(s) of size " << n << " to " << out_path << "\n";
    return 0;
}

inline int verify_diagram(std::ostream& out, Family f, int nmax) {
    Report rep(out);
    for (int n = 1; n <= nmax; ++n) {
        uint64_t walks = 0, ok = 0;
        for_each_walk(f, n, [&](const Walk& w) {
            ++walks;
            if (check_commute(w, f)) ++ok;
        });
        rep.check_true("inverse-bijection equals coalescent route, n=" + std::to_string(n), ok == walks,
                       std::to_string(ok) + "/" + std::to_string(walks) + " walks");
    }
    return rep.exit_code();
}

inline int verify_lemma(std::ostream& out, Family f, int nmax) {
    Report rep(out);
    for (int n = 1; n <= nmax; ++n) {
        uint64_t nodes = 0, ok = 0;
        for_each_walk(f, n, [&](const Walk& w) {
            ++nodes;
            if (check_active_sites_at_end(w, f)) ++ok;
        });
        rep.check_true("final values/active sites identity, n=" + std::to_string(n), ok == nodes,
                       std::to_string(ok) + "/" + std::to_string(nodes) + " prefixes");
    }
    return rep.exit_code();
}

inline int verify_measure(std::ostream& out, Family f, int64_t reps, uint64_t seed) {
    Report rep(out);
    Params p = params_of(f);
    for (bool rev : {false, true}) {
        std::string tag = rev ? " (reversed)" : "";
        StepDistribution mu(f, rev);
        auto d = mu.diagnostics();
        rep.check("measure mass" + tag, d.mass, 1.0, 1e-10);
        rep.check("mean x" + tag, d.mean_x, 0.0, 1e-10);
        rep.check("mean y" + tag, d.mean_y, 0.0, 1e-10);
        rep.check("var x" + tag, d.var_x, p.sigma2, 1e-10);
        rep.check("var y" + tag, d.var_y, p.sigma2p, 1e-10);
        rep.check("cov xy" + tag, d.cov_xy, p.cov_xy, 1e-10);
        rep.check("correlation" + tag, d.corr, p.rho, 1e-10);
    }
    // Monte Carlo moments within 4 empirical standard errors
    StepDistribution mu(f, false);
    double sx = 0, sy = 0, sxx = 0, syy = 0, sxy = 0, s4x = 0, s4y = 0;
    Rng rng(seed);
    for (int64_t i = 0; i < reps; ++i) {
        Pt d = mu.sample(rng);
        double x = d.x, y = d.y;
        sx += x;
        sy += y;
        sxx += x * x;
        syy += y * y;
        sxy += x * y;
        s4x += x * x * x * x;
        s4y += y * y * y * y;
    }
    double nrm = static_cast<double>(reps);
    double se_x2 = std::sqrt(std::max(s4x / nrm - (sxx / nrm) * (sxx / nrm), 0.0) / nrm);
    double se_y2 = std::sqrt(std::max(s4y / nrm - (syy / nrm) * (syy / nrm), 0.0) / nrm);
    rep.check("sampled mean x", sx / nrm, 0.0, 4 * p.sigma / std::sqrt(nrm));
    rep.check("sampled mean y", sy / nrm, 0.0, 4 * p.sigmap / std::sqrt(nrm));
    rep.check("sampled var x", sxx / nrm, p.sigma2, 4 * se_x2);
    rep.check("sampled var y", syy / nrm, p.sigma2p, 4 * se_y2);
    double corr = (sxy / nrm) / std::sqrt((sxx / nrm) * (syy / nrm));
    rep.check("sampled correlation", corr, p.rho, 0.005);
    return rep.exit_code();
}

inline int verify_ladder(std::ostream& out, Family f, int64_t samples, uint64_t seed,
                         const std::string& csv_path) {
    Report rep(out);
    std::vector<std::vector<std::string>> csv;
    for (Component c : {Component::x, Component::y}) {
        std::string tag = c == Component::x ? "x" : "y";
        LadderResult r = ladder_height_check(f, c, samples, seed);
        double ratio = r.ratio;
        rep.check_pvalue("ladder law geometric(" + tag + ")", ladder_chi_square(r).pvalue);
        rep.check("ladder mean(" + tag + ")", r.mean_abs, 1.0 / (1 - ratio), 0.01 / (1 - ratio));
        rep.check("P(depth=1)(" + tag + ")", static_cast<double>(r.hist[0]) / r.samples, 1 - ratio, 0.005);
        if (r.censored) rep.note("censored entry times: " + std::to_string(r.censored));
        for (size_t d = 0; d < r.hist.size(); ++d) {
            double expect = samples * (1 - ratio) * std::pow(ratio, d);
            csv.push_back({"ladder_" + tag, std::to_string(d + 1), std::to_string(r.hist[d]),
                           csv_num(expect)});
        }
    }
    if (f == Family::semi) {
        auto est = renewal_function_check(std::max<int64_t>(samples / 5, 2000), seed + 1);
        rep.check("renewal h'(-1)", est[0].estimate, renewal_closed_form(-1), 0.01);
        rep.check("renewal h'(-3)", est[2].estimate, renewal_closed_form(-3), 0.02);
        rep.check("renewal h'(-8)", est[7].estimate, renewal_closed_form(-8), 0.05);
        for (const auto& e : est)
            csv.push_back({"renewal", std::to_string(e.x), csv_num(e.estimate),
                           csv_num(renewal_closed_form(e.x))});
    } else {
        // zero-return tail of the trajectory opened at the origin
        Params p = params_of(f);
        TailEstimate t = return_time_tail(f, 200, 500, std::max<int64_t>(samples, 100000), seed + 2);
        rep.check("zero-return tail constant (k in [200,500])", t.average, p.beta, 0.08);
        rep.check("renewal mass constant", t.renewal_average, 1.0 / p.beta, 0.15 / p.beta);
        for (size_t i = 0; i < t.scaled.size(); ++i)
            csv.push_back({"tail", std::to_string(t.kmin + static_cast<int>(i)), csv_num(t.scaled[i]),
                           csv_num(t.renewal_scaled[i])});
    }
    if (!csv_path.empty()) {
        write_csv(csv_path, {"section", "arg", "observed", "expected_or_companion"}, csv);
        rep.note("wrote " + csv_path);
    }
    return rep.exit_code();
}

inline int verify_skewness(std::ostream& out, Family f, int n, int reps, uint64_t seed) {
    Report rep(out);
    Params p = params_of(f);
    SkewnessEstimate e = empirical_skewness(n, f, reps, 1.0, seed);
    rep.check("skew parameter", e.estimate, p.q, 0.02);
    rep.note("99% CI half-width " + std::to_string(e.ci99) + " over " + std::to_string(reps) + " runs");
    auto sim = skewness_samples(n, f, reps, 1.0, seed + 1);
    auto ref = skew_bm_reference(p.q, 1.0, reps, seed + 2);
    double ks = ks_two_sample(sim, ref);
    rep.check_true("KS distance to flipped half-normal oracle < 0.03", ks < 0.03, "ks=" + std::to_string(ks));
    return rep.exit_code();
}

inline int cmd_verify(std::ostream& out, const std::string& suite, const std::string& family, int nmax,
                      int n, int64_t reps, uint64_t seed, const std::string& csv_path) {
    Family f = parse_family(family);
    out << "verify " << suite << " --family " << family << "\n";
    int rc;
    if (suite == "diagram")
        rc = verify_diagram(out, f, nmax > 0 ? nmax : 9);
    else if (suite == "lemma")
        rc = verify_lemma(out, f, nmax > 0 ? nmax : 8);
    else if (suite == "measure")
        rc = verify_measure(out, f, reps > 0 ? reps : 1000000, seed);
    else if (suite == "ladder")
        rc = verify_ladder(out, f, reps > 0 ? reps : 100000, seed, csv_path);
    else if (suite == "skewness")
        rc = verify_skewness(out, f, n > 0 ? n : 10000, reps > 0 ? static_cast<int>(reps) : 10000, seed);
    else
        throw CLI::ValidationError("suite", "unknown suite: " + suite);
    out << (rc == 0 ? "ALL CHECKS PASSED" : "CHECKS FAILED") << "\n";
    return rc;
}

inline int cmd_render(std::ostream& out, const std::string& in_path, const std::string& out_path,
                      const std::string& mode, const std::string& csv_path) {
    Envelope env = read_envelope(in_path);
    Family f = parse_family(env.family);
    std::string svg;
    if (mode == "diagram") {
        Permutation sigma =
            env.kind == "permutation" ? json_to_perms(env.data).at(0) : walk_to_perm(json_to_walks(env.data).at(0), f);
        svg = svg_diagram(sigma);
    } else if (mode == "coalescent") {
        Walk w = env.kind == "permutation" ? perm_to_walk(json_to_perms(env.data).at(0), f)
                                           : json_to_walks(env.data).at(0);
        svg = svg_coalescent(w, f);
        if (!csv_path.empty()) {
            CoalescentProcess proc(w, f, /*materialize_threshold=*/0);
            int n = proc.size();
            int stride = std::max(1, (n + 255) / 256);
            std::vector<std::vector<std::string>> rows;
            for (int t = 1; t <= n; t += stride) {
                auto tr = proc.trajectory(t);
                for (size_t j = 0; j < tr.size(); ++j)
                    rows.push_back({std::to_string(t), std::to_string(t + static_cast<int>(j)),
                                    std::to_string(tr[j])});
            }
            write_csv(csv_path, {"t", "s", "z"}, rows);
            out << "wrote " << csv_path << "\n";
        }
    } else {
        throw CLI::ValidationError("mode", "mode must be diagram or coalescent");
    }
    atomic_write(out_path, svg);
    out << "wrote " << out_path << "\n";
    return 0;
}

inline void dump_permuton_csv(const std::string& path, const EmpiricalPermuton& e) {
    std::vector<std::vector<std::string>> rows;
    for (int ix = 0; ix < e.grid(); ++ix)
        for (int iy = 0; iy < e.grid(); ++iy)
            rows.push_back({std::to_string(ix), std::to_string(iy), csv_num(e.at(ix, iy))});
    write_csv(path, {"ix", "iy", "mass"}, rows);
}

inline int cmd_converge(std::ostream& out, const std::string& family, const std::vector<int>& sizes, int reps,
                        int grid, uint64_t seed, const std::string& out_path, const std::string& dump_prefix) {
    Family f = parse_family(family);
    Family other = f == Family::strong ? Family::semi : Family::strong;
    ConvergenceDiag diag = convergence_diagnostic(f, sizes, reps, grid, seed);
    std::vector<std::vector<std::string>> rows;
    for (const auto& r : diag.rows) {
        rows.push_back({"consecutive", family_name(f), std::to_string(r.n_small), std::to_string(r.n_big),
                        std::to_string(reps), std::to_string(grid), csv_num(r.d), csv_num(r.d_sd)});
    }
    int nlast = sizes.back();
    AveragedPermuton mine = averaged_permuton(f, nlast, reps, grid, derive_seed(seed, sizes.size() - 1));
    AveragedPermuton theirs = averaged_permuton(other, nlast, reps, grid, derive_seed(seed, 1000));
    double cross = rect_distance(mine.mean, theirs.mean);
    if (!dump_prefix.empty()) {
        dump_permuton_csv(dump_prefix + "_" + family_name(f) + "_" + std::to_string(nlast) + ".csv", mine.mean);
        dump_permuton_csv(dump_prefix + "_" + family_name(other) + "_" + std::to_string(nlast) + ".csv",
                          theirs.mean);
        out << "wrote mass matrices with prefix " << dump_prefix << "\n";
    }
    rows.push_back({"cross-family", std::string(family_name(f)) + "-vs-" + family_name(other),
                    std::to_string(nlast), std::to_string(nlast), std::to_string(reps), std::to_string(grid),
                    csv_num(cross), ""});
    write_csv(out_path, {"kind", "family", "n_a", "n_b", "reps", "grid", "d_rect", "d_sd"}, rows);
    out << "wrote " << out_path << "\n";
    for (const auto& r : diag.rows)
        out << "  d(" << r.n_small << "," << r.n_big << ") = " << csv_num(r.d) << " (sd " << csv_num(r.d_sd)
            << ")\n";
    out << "  cross-family d at n=" << nlast << ": " << csv_num(cross) << "\n";
    return 0;
}

}  // namespace cli

// Batch front end. Exit codes: 0 success, 1 verification failure, 2 usage or
// input error.
inline int run_cli(const std::vector<std::string>& args, std::ostream& out, std::ostream& err) {
    CLI::App app{"permuton-lab: generating-tree walks, coalescent processes and permuton diagnostics"};
    app.require_subcommand(1);

    std::string family = "strong", method = "exact", kind = "permutation", suite, in_path, out_path, sizes_str;
    std::string csv_path, dump_prefix;
    int n = 0, count = 1, nmax = 0, grid = 64, reps = 0, budget = 0;
    uint64_t seed = 1;
    bool brute = false, machine = false;

    auto* c_params = app.add_subcommand("params", "print solved step-measure parameters");
    c_params->add_option("family", family, "strong | semi")->required();
    c_params->add_flag("--machine", machine, "key=value output");

    auto* c_enum = app.add_subcommand("enumerate", "exact member counts by size");
    c_enum->add_option("family", family)->required();
    c_enum->add_option("--nmax", nmax, "largest size")->required();
    c_enum->add_flag("--brute", brute, "cross-check against brute force (nmax <= 9)");

    auto* c_sample = app.add_subcommand("sample", "draw uniform members");
    c_sample->add_option("family", family)->required();
    c_sample->add_option("--n", n, "size")->required();
    c_sample->add_option("--count", count, "number of samples");
    c_sample->add_option("--method", method, "exact | rejection");
    c_sample->add_option("--seed", seed, "64-bit seed");
    c_sample->add_option("--out", out_path, "output file")->required();
    c_sample->add_option("--kind", kind, "permutation | walk | labels");
    c_sample->add_option("--budget", budget, "raise the sampler's size budget");

    auto* c_verify = app.add_subcommand("verify", "run a verification suite");
    c_verify->add_option("suite", suite, "diagram | lemma | measure | ladder | skewness")->required();
    c_verify->add_option("--family", family)->required();
    c_verify->add_option("--nmax", nmax, "exhaustive size bound");
    c_verify->add_option("--n", n, "walk length (skewness)");
    c_verify->add_option("--reps", reps, "replicates / samples");
    c_verify->add_option("--seed", seed);
    c_verify->add_option("--out", csv_path, "write histogram / tail tables as CSV (ladder suite)");

    auto* c_render = app.add_subcommand("render", "render an envelope file to SVG");
    c_render->add_option("--in", in_path, "input envelope")->required();
    c_render->add_option("--out", out_path, "output .svg")->required();
    c_render->add_option("--mode", kind, "diagram | coalescent")->required();
    c_render->add_option("--dump-csv", csv_path, "also write trajectories as (t,s,z) CSV (coalescent mode)");

    auto* c_conv = app.add_subcommand("converge", "rectangle-distance convergence table");
    c_conv->add_option("family", family)->required();
    c_conv->add_option("--sizes", sizes_str, "comma-separated sizes")->required();
    c_conv->add_option("--reps", reps, "samples per size");
    c_conv->add_option("--grid", grid, "permuton grid");
    c_conv->add_option("--seed", seed);
    c_conv->add_option("--out", out_path, "output CSV")->required();
    c_conv->add_option("--dump", dump_prefix, "also write averaged mass matrices as CSV with this prefix");

    std::vector<const char*> argv;
    argv.push_back("permuton-lab");
    for (const auto& a : args) argv.push_back(a.c_str());
    try {
        app.parse(static_cast<int>(argv.size()), argv.data());
    } catch (const CLI::ParseError& e) {
        int code = app.exit(e, out, err);
        return code == 0 ? 0 : 2;
    }

    try {
        if (c_params->parsed()) return cli::cmd_params(out, family, machine);
        if (c_enum->parsed()) {
            if (brute && nmax > 9) {
                err << "error: --brute supports nmax <= 9\n";
                return 2;
            }
            return cli::cmd_enumerate(out, family, nmax, brute);
        }
        if (c_sample->parsed()) return cli::cmd_sample(out, family, n, count, method, seed, out_path, kind, budget);
        if (c_verify->parsed()) return cli::cmd_verify(out, suite, family, nmax, n, reps, seed, csv_path);
        if (c_render->parsed()) return cli::cmd_render(out, in_path, out_path, kind, csv_path);
        if (c_conv->parsed()) {
            std::vector<int> sizes;
            std::stringstream ss(sizes_str);
            std::string tok;
            while (std::getline(ss, tok, ',')) sizes.push_back(std::stoi(tok));
            return cli::cmd_converge(out, family, sizes, reps > 0 ? reps : 200, grid, seed, out_path,
                                     dump_prefix);
        }
    } catch (const CLI::ValidationError& e) {
        err << "error: " << e.what() << "\n";
        return 2;
    } catch (const BudgetExceeded& e) {
        err << "error: " << e.what() << "\n";
        return 2;
    } catch (const std::invalid_argument& e) {
        err << "error: " << e.what() << "\n";
        return 2;
    } catch (const std::exception& e) {
        err << "error: " << e.what() << "\n";
        return 2;
    }
    return 2;
}

}  // namespace permlab
