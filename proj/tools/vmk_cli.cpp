#include <cmath>
#include <cstdio>
#include <filesystem>
#include <iostream>
#include <optional>
#include <sstream>
#include <string>
#include <vector>

#include <CLI11.hpp>

#include "vmk/bench.hpp"
#include "vmk/clp.hpp"
#include "vmk/generator.hpp"
#include "vmk/model.hpp"
#include "vmk/solvers.hpp"

namespace fs = std::filesystem;
using namespace vmk;

namespace {

// Either --instance <file> or a generator spec.
struct InstanceSource {
    std::string path;
    std::optional<int> csv_bins;
    std::string family = "uniform";
    int n = 12;
    int m = 3;
    std::uint64_t seed = 1;
    std::vector<double> params;

    void attach(CLI::App* app, bool with_file) {
        if (with_file) {
            app->add_option("--instance", path, "instance file (.json or .csv)");
            app->add_option("--csv-m", csv_bins, "bin count for CSV instances");
        }
        app->add_option("--family", family, "uniform | correlated | zipfProfit | clustered");
        app->add_option("--n", n, "item count");
        app->add_option("--m", m, "bin count");
        app->add_option("--gen-seed", seed, "generator seed");
        app->add_option("--param", params, "family parameters");
    }

    GeneratorSpec spec() const {
        auto f = parse_family(family);
        if (!f) throw CLI::ValidationError("--family", "unknown family '" + family + "'");
        return GeneratorSpec{*f, n, m, seed, params};
    }

    Instance load() const {
        if (path.empty()) return generate(spec());
        const auto fmt = format_from_path(path);
        std::optional<int> bins = csv_bins;
        if (fmt == InstanceFormat::Csv && !bins) bins = m;
        return load_instance(path, fmt, bins);
    }
};

std::string csv_escape_free(double v) {
    char buf[40];
    std::snprintf(buf, sizeof(buf), "%.10g", v);
    return buf;
}

std::string instance_csv(const Instance& inst) {
    std::ostringstream out;
    out << "id,w1,w2,p\n";
    char buf[128];
    for (const auto& it : inst.items()) {
        std::snprintf(buf, sizeof(buf), "%.17g,%.17g,%.17g", it.w1, it.w2, it.profit);
        out << it.id << ',' << buf << '\n';
    }
    return out.str();
}

std::string report_csv(const SolveReport& r, const Instance& inst) {
    auto opt = [](const std::optional<double>& v) { return v ? csv_escape_free(*v) : std::string(); };
    auto ratio = [&](const std::optional<double>& den) -> std::string {
        if (!den) return {};
        if (*den <= 0.0) return r.profit <= 0.0 ? "1" : "";
        return csv_escape_free(r.profit / *den);
    };
    std::ostringstream out;
    out << bench_csv_header() << '\n';
    out << algorithm_name(r.algorithm) << ',' << r.seed << ',' << r.trial_index << ',' << inst.size() << ','
        << inst.bins() << ',' << csv_escape_free(r.profit) << ',' << opt(r.lp_value) << ',' << opt(r.exact_opt)
        << ',' << ratio(r.exact_opt) << ',' << ratio(r.lp_value) << ',' << csv_escape_free(r.wall_ms) << ','
        << r.bins_used << ',' << (r.lp_converged ? "true" : "false") << '\n';
    return out.str();
}

int cmd_gen(const InstanceSource& src, const fs::path& out) {
    const auto inst = generate(src.spec());
    save_instance(inst, out / "instance.json");
    write_file(out / "instance.csv", instance_csv(inst));
    std::cout << "wrote " << inst.size() << " items, m = " << inst.bins() << ", hash "
              << hash_hex(canonical_hash(inst)) << '\n';
    return 0;
}

struct SolveArgs {
    std::string algo = "hybrid";
    double eps = 0.1;
    std::uint64_t seed = 0;
    std::string mk_mode = "auto";
    std::optional<int> ell;
    std::string dump_lp;
};

int cmd_solve(const InstanceSource& src, const SolveArgs& a, const fs::path& out) {
    const auto inst = src.load();
    const auto algo = parse_algorithm(a.algo);
    if (!algo) throw CLI::ValidationError("--algo", "unknown algorithm '" + a.algo + "'");
    const auto mode = parse_mk_mode(a.mk_mode);
    if (!mode) throw CLI::ValidationError("--mk-mode", "unknown mode '" + a.mk_mode + "'");

    const auto lp = solve_clp(inst, a.eps);
    if (!a.dump_lp.empty()) write_file(a.dump_lp, fractional_solution_json(inst, lp));

    HybridParams params;
    params.eps = a.eps;
    params.seed = a.seed;
    params.ell_override = a.ell;
    params.mk_mode = *mode;

    SolveResult res;
    switch (*algo) {
        case Algorithm::Hybrid:
            res = solve_hybrid(inst, params, lp);
            break;
        case Algorithm::Baseline:
            res = solve_sampling_baseline(inst, lp, a.seed);
            break;
        case Algorithm::Reduction:
            res = solve_reduction(inst, a.eps, *mode);
            break;
        case Algorithm::Exact: {
            auto ex = solve_exact(inst);
            res.solution = ex.solution;
            res.solution.bins.resize(static_cast<std::size_t>(inst.bins()));
            res.report.algorithm = Algorithm::Exact;
            res.report.profit = ex.profit;
            res.report.bins_used = static_cast<int>(bins_used(ex.solution));
            if (ex.complete) res.report.exact_opt = ex.profit;
            break;
        }
        case Algorithm::Mck: {
            const auto mck = reduce_to_mck(inst);
            const auto sol = solve_mck_exact(mck);
            res.solution = mck_to_solution(inst, mck, sol);
            res.report.algorithm = Algorithm::Mck;
            res.report.profit = solution_profit(inst, res.solution);
            res.report.bins_used = static_cast<int>(bins_used(res.solution));
            if (sol.complete) res.report.exact_opt = sol.profit;
            break;
        }
        case Algorithm::EpsNice: {
            auto inner = [&](const Instance& sub) { return solve_hybrid(sub, params).solution; };
            res = eps_nice_wrap(inst, a.eps, default_prefix_budget(inst, a.eps), inner);
            break;
        }
    }
    res.report.seed = a.seed;
    res.report.lp_value = lp.value;
    res.report.lp_bound = lp.upper_bound;
    res.report.lp_converged = lp.converged;

    const auto check = check_solution(inst, res.solution);
    write_file(out / "solution.json", solution_json(inst, res.solution));
    write_file(out / "report.json", report_json(res.report) + "\n");
    write_file(out / "report.csv", report_csv(res.report, inst));
    std::cout << algorithm_name(*algo) << ": profit " << res.report.profit << ", x* " << lp.value
              << (lp.converged ? "" : " (not converged)") << ", bins used " << res.report.bins_used << '\n';
    if (!check.feasible()) {
        std::cerr << "solution violates " << check.violations.size() << " constraint(s)\n";
        return 1;
    }
    return 0;
}

struct BenchArgs {
    int count = 10;
    int trials = 20;
    std::vector<std::string> algos{"hybrid", "baseline", "reduction"};
    double eps = 0.01;
    std::string mk_mode = "auto";
    bool check = false;
    bool no_oracle = false;
};

int cmd_bench(const InstanceSource& src, const BenchArgs& a, const fs::path& out) {
    std::vector<GeneratorSpec> suite;
    for (int k = 0; k < a.count; ++k) {
        auto spec = src.spec();
        spec.seed = derive_seed(src.seed, static_cast<std::uint64_t>(k));
        suite.push_back(spec);
    }
    std::vector<Algorithm> algos;
    for (const auto& name : a.algos) {
        auto al = parse_algorithm(name);
        if (!al) throw CLI::ValidationError("--algos", "unknown algorithm '" + name + "'");
        algos.push_back(*al);
    }
    BenchOptions opts;
    opts.eps = a.eps;
    opts.exact_oracle = !a.no_oracle;
    auto mode = parse_mk_mode(a.mk_mode);
    if (!mode) throw CLI::ValidationError("--mk-mode", "unknown mode '" + a.mk_mode + "'");
    opts.mk_mode = *mode;

    const auto result = run_ratio_bench(suite, algos, a.trials, opts);
    write_experiment(result, out);
    for (const auto& agg : result.aggregates) {
        std::printf("%-10s rows %4d  ratio_opt %.4f (sd %.4f)  ratio_lp %.4f (sd %.4f)\n",
                    std::string(algorithm_name(agg.algorithm)).c_str(), agg.rows, agg.mean_ratio_opt,
                    agg.sd_ratio_opt, agg.mean_ratio_lp, agg.sd_ratio_lp);
    }
    if (result.hybrid_vs_baseline) {
        const auto& d = *result.hybrid_vs_baseline;
        std::printf("hybrid - baseline: %.5f +- %.5f (95%% CI [%.5f, %.5f], vs %s)\n", d.mean, d.std_error,
                    d.mean - 1.96 * d.std_error, d.mean + 1.96 * d.std_error, d.vs_opt ? "exact_opt" : "x*");
    }
    if (result.oracle_incomplete) std::printf("exact oracle incomplete on some instances; ratios vs x* only\n");
    if (a.check) {
        const auto failures = check_experiment(result);
        for (const auto& f : failures) std::fprintf(stderr, "check failed: %s\n", f.c_str());
        if (!failures.empty()) return 2;
    }
    return 0;
}

int cmd_marginal(const InstanceSource& src, int trials, std::uint64_t seed, double eps, const fs::path& out) {
    const auto inst = src.load();
    const auto lp = solve_clp(inst, eps);
    if (!lp.converged) std::fprintf(stderr, "warning: LP did not converge (gap %.3g)\n", lp.certified_gap);
    const auto curve = run_marginal_curve(inst, lp, trials, seed);
    write_file(out / "marginal.csv", marginal_csv(curve));
    write_file(out / "marginal.json", marginal_json(curve) + "\n");
    if (!curve.points.empty()) {
        const auto& first = curve.points.front();
        const auto& last = curve.points.back();
        std::printf("x* %.6g  q1 %.6g  qm %.6g  qm/q1 %.4f  monotone %s\n", curve.x_star, first.q_hat, last.q_hat,
                    first.q_hat > 0 ? last.q_hat / first.q_hat : 0.0, curve.monotone ? "yes" : "no");
    }
    return 0;
}

int cmd_concentration(const InstanceSource& src, std::optional<int> ell, int trials, std::vector<double> t_values,
                      std::uint64_t seed, double eps, const fs::path& out) {
    const auto inst = src.load();
    const auto lp = solve_clp(inst, eps);
    const int l = ell.value_or(default_ell(inst.bins()));
    if (t_values.empty()) {
        // Pick t so the bound is 0.5, 0.25 and 0.1, using a pilot run for mean / eta.
        const auto pilot = run_concentration(inst, lp, l, 100, {}, seed ^ 0x9e3779b97f4a7c15ULL);
        const double z = pilot.eta > 0 ? pilot.mean / pilot.eta : 0.0;
        for (double b : {0.5, 0.25, 0.1}) t_values.push_back(t_for_bound(z, b));
    }
    const auto rep = run_concentration(inst, lp, l, trials, t_values, seed);
    write_file(out / "concentration.json", concentration_json(rep) + "\n");
    write_file(out / "concentration.csv", concentration_csv(rep));
    for (const auto& p : rep.points) {
        std::printf("t %.4f  empirical %.5f  bound %.5f  %s\n", p.t, p.empirical, p.bound, p.pass ? "ok" : "EXCEEDED");
    }
    return rep.pass() ? 0 : 2;
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"2-D vector multiple knapsack solvers and experiments"};
    app.require_subcommand(1);
    std::string out = "out";

    InstanceSource gen_src, solve_src, bench_src, marg_src, conc_src;

    auto* gen = app.add_subcommand("gen", "generate an instance");
    gen_src.attach(gen, false);
    gen->add_option("--out", out, "output directory");

    auto* solve = app.add_subcommand("solve", "solve one instance");
    solve_src.attach(solve, true);
    SolveArgs sargs;
    solve->add_option("--algo", sargs.algo, "hybrid | baseline | reduction | exact | mck | epsnice");
    solve->add_option("--eps", sargs.eps, "accuracy parameter");
    solve->add_option("--seed", sargs.seed, "sampling seed");
    solve->add_option("--mk-mode", sargs.mk_mode, "exact | heuristic | auto");
    solve->add_option("--ell", sargs.ell, "number of sampled configurations (hybrid)");
    solve->add_option("--dump-lp", sargs.dump_lp, "write the LP pool and masses as JSON");
    solve->add_option("--out", out, "output directory");

    auto* bench = app.add_subcommand("bench", "ratio benchmark over a generated suite");
    bench_src.attach(bench, false);
    BenchArgs bargs;
    bench->add_option("--count", bargs.count, "instances in the suite");
    bench->add_option("--trials", bargs.trials, "trials per randomized algorithm");
    bench->add_option("--algos", bargs.algos, "algorithms to run");
    bench->add_option("--eps", bargs.eps, "LP accuracy");
    bench->add_option("--mk-mode", bargs.mk_mode, "exact | heuristic | auto");
    bench->add_flag("--check", bargs.check, "exit 2 if any bench assertion fails");
    bench->add_flag("--no-oracle", bargs.no_oracle, "skip the exact oracle");
    bench->add_option("--out", out, "output directory");

    auto* marginal = app.add_subcommand("marginal", "marginal profit curve of sampled configurations");
    marg_src.attach(marginal, true);
    int marg_trials = 1000;
    std::uint64_t marg_seed = 7;
    double marg_eps = 0.01;
    marginal->add_option("--trials", marg_trials, "trials");
    marginal->add_option("--seed", marg_seed, "sampling seed");
    marginal->add_option("--eps", marg_eps, "LP accuracy");
    marginal->add_option("--out", out, "output directory");

    auto* conc = app.add_subcommand("concentration", "lower-tail experiment for p(T)");
    conc_src.attach(conc, true);
    std::optional<int> conc_ell;
    int conc_trials = 10000;
    std::vector<double> conc_t;
    std::uint64_t conc_seed = 11;
    double conc_eps = 0.01;
    conc->add_option("--ell", conc_ell, "sampled configurations (default ceil(m ln 2))");
    conc->add_option("--trials", conc_trials, "trials (at least 100)");
    conc->add_option("--t", conc_t, "t values (default: bound 0.5, 0.25, 0.1)");
    conc->add_option("--seed", conc_seed, "sampling seed");
    conc->add_option("--eps", conc_eps, "LP accuracy");
    conc->add_option("--out", out, "output directory");

    CLI11_PARSE(app, argc, argv);

    try {
        const fs::path dir(out);
        if (gen->parsed()) return cmd_gen(gen_src, dir);
        if (solve->parsed()) return cmd_solve(solve_src, sargs, dir);
        if (bench->parsed()) return cmd_bench(bench_src, bargs, dir);
        if (marginal->parsed()) return cmd_marginal(marg_src, marg_trials, marg_seed, marg_eps, dir);
        if (conc->parsed()) return cmd_concentration(conc_src, conc_ell, conc_trials, conc_t, conc_seed, conc_eps, dir);
    } catch (const CLI::Error& e) {
        return app.exit(e);
    } catch (const ValidationError& e) {
        std::cerr << "invalid instance: " << e.what() << '\n';
        return 1;
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << '\n';
        return 1;
    }
    return 0;
}
