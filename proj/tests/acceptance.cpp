// Acceptance checks. Prints one PASS/FAIL line per criterion and exits nonzero
// if any criterion fails.

#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <numeric>
#include <string>
#include <vector>

#include "oracles.hpp"
#include "vmk/bench.hpp"
#include "vmk/clp.hpp"
#include "vmk/generator.hpp"
#include "vmk/mk.hpp"
#include "vmk/solvers.hpp"

using namespace vmk;

namespace {

using Clock = std::chrono::steady_clock;

double seconds_since(Clock::time_point t) { return std::chrono::duration<double>(Clock::now() - t).count(); }

int failures = 0;

void report(int id, bool ok, const std::string& detail) {
    std::printf("[%s] AC%d %s\n", ok ? "PASS" : "FAIL", id, detail.c_str());
    std::fflush(stdout);
    if (!ok) ++failures;
}

std::string fmt(const char* f, auto... args) {
    char buf[512];
    std::snprintf(buf, sizeof(buf), f, args...);
    return buf;
}

struct MeanSd {
    double mean = 0.0;
    double sd = 0.0;
};

MeanSd mean_sd(const std::vector<double>& xs) {
    MeanSd r;
    for (double x : xs) r.mean += x;
    r.mean /= static_cast<double>(xs.size());
    double ss = 0.0;
    for (double x : xs) ss += (x - r.mean) * (x - r.mean);
    r.sd = xs.size() > 1 ? std::sqrt(ss / static_cast<double>(xs.size() - 1)) : 0.0;
    return r;
}

// The exact-solvable suite: 50 instances, n in [4, 12], m in [1, 3].
struct SuiteEntry {
    Instance inst;
    FractionalSolution lp;
    double opt = 0.0;
};

std::vector<SuiteEntry> build_suite() {
    const auto specs = oracle::small_suite(50, 20240601);
    std::vector<SuiteEntry> suite(specs.size());
    parallel_for(specs.size(), [&](std::size_t k) {
        suite[k].inst = generate(specs[k]);
        suite[k].lp = solve_clp(suite[k].inst, 1e-9);
    });
    return suite;
}

void ac1_oracles(std::vector<SuiteEntry>& suite) {
    const auto start = Clock::now();
    std::vector<char> ok(suite.size(), 0);
    std::vector<double> worst(suite.size(), 0.0);
    parallel_for(suite.size(), [&](std::size_t k) {
        const auto& inst = suite[k].inst;
        const auto ex = solve_exact(inst);
        const auto mck = solve_mck_exact(reduce_to_mck(inst));
        const double brute = oracle::best_assignment(inst);
        const double sol_profit = solution_profit(inst, ex.solution);
        worst[k] = std::max({std::abs(ex.profit - brute), std::abs(mck.profit - brute), std::abs(sol_profit - brute)});
        ok[k] = ex.complete && mck.complete && worst[k] <= 1e-9 && check_solution(inst, ex.solution).feasible();
        suite[k].opt = brute;
    });
    const double secs = seconds_since(start);
    const auto bad = std::count(ok.begin(), ok.end(), 0);
    report(1, bad == 0 && secs <= 120.0,
           fmt("oracle agreement (exact / mck / enumeration): %zu instances, %ld disagreements, max |diff| %.2e, %.1f s",
               suite.size(), static_cast<long>(bad), *std::max_element(worst.begin(), worst.end()), secs));
}

void ac2_lp_bound(const std::vector<SuiteEntry>& suite) {
    int bad = 0;
    double min_slack = INFINITY;
    for (const auto& e : suite) {
        const double slack = e.lp.value - e.opt;
        min_slack = std::min(min_slack, slack);
        if (!e.lp.converged || slack < -1e-7) ++bad;
    }
    report(2, bad == 0, fmt("LP upper bound: %d violations, min (x* - OPT) = %.3e", bad, min_slack));
}

void ac3_reduction(const std::vector<SuiteEntry>& suite) {
    int bad = 0;
    double worst = INFINITY;
    for (const auto& e : suite) {
        const double p = solve_reduction(e.inst, 0.01, MkMode::Exact).report.profit;
        const double r = e.opt > 0 ? p / e.opt : 1.0;
        worst = std::min(worst, r);
        if (p < 0.5 * e.opt - 1e-9) ++bad;
    }
    Rng rng(3);
    int split_bad = 0;
    const int configs = 10000;
    for (int t = 0; t < configs; ++t) {
        const auto inst = generate({static_cast<Family>(t % 4), 14, 1, derive_seed(33, static_cast<std::uint64_t>(t)), {}});
        std::vector<std::size_t> order(inst.size());
        std::iota(order.begin(), order.end(), 0);
        for (std::size_t k = order.size(); k > 1; --k) std::swap(order[k - 1], order[rng.below(k)]);
        std::vector<std::size_t> pick;
        double w1 = 0, w2 = 0;
        for (auto i : order) {
            const auto& it = inst.item(i);
            if (w1 + it.w1 <= 1 && w2 + it.w2 <= 1 && rng.uniform01() < 0.8) {
                pick.push_back(i);
                w1 += it.w1;
                w2 += it.w2;
            }
        }
        const Configuration c(pick);
        const auto [b, c2] = split_configuration(inst, c);
        double sb = 0, sc = 0;
        for (auto i : b) sb += inst.item(i).max_weight();
        for (auto i : c2) sc += inst.item(i).max_weight();
        if (sb > 1 + kFeasTol || sc > 1 + kFeasTol || b.size() + c2.size() != c.size()) ++split_bad;
    }
    report(3, bad == 0 && split_bad == 0,
           fmt("reduction >= OPT/2: %d violations (worst ratio %.4f); split feasibility: %d / %d failures", bad, worst,
               split_bad, configs));
}

void ac4_marginals() {
    const auto inst = generate({Family::Uniform, 24, 5, 404, {}});
    const auto lp = solve_clp(inst, 1e-9);
    ConfigurationSampler sampler(lp);
    Rng rng(4);
    const int draws = 100000;
    std::vector<int> hits(inst.size(), 0);
    for (int t = 0; t < draws; ++t) {
        for (auto i : sampler.draw(rng)) ++hits[i];
    }
    const auto cov = lp.coverage(inst.size());
    int bad = 0;
    double worst_z = 0.0;
    for (std::size_t i = 0; i < inst.size(); ++i) {
        const double p = cov[i] / inst.bins();
        const double f = hits[i] / static_cast<double>(draws);
        const double se = std::sqrt(p * (1 - p) / draws);
        if (se == 0.0) {
            if (f != p) ++bad;
            continue;
        }
        const double z = std::abs(f - p) / se;
        worst_z = std::max(worst_z, z);
        if (z > 3.0) ++bad;
    }
    report(4, lp.converged && bad == 0,
           fmt("sampling marginals: %zu items, %d beyond 3 SE, max |z| %.2f over %d draws", inst.size(), bad, worst_z,
               draws));
}

void ac5_coverage() {
    const auto start = Clock::now();
    const auto inst = generate({Family::Uniform, 60, 10, 505, {}});
    const auto lp = solve_clp(inst, 1e-9);
    const int m = inst.bins();
    const int ell = default_ell(m);
    const int trials = 500;
    ConfigurationSampler sampler(lp);
    std::vector<double> pt(trials), base(trials);
    parallel_for(trials, [&](std::size_t t) {
        Rng rng(derive_seed(55, t));
        pt[t] = profit_of(inst, sample_T(sampler, ell, rng).items);
        base[t] = solve_sampling_baseline(inst, lp, derive_seed(56, t)).report.profit;
    });
    const auto a = mean_sd(pt);
    const auto b = mean_sd(base);
    const double slack_a = 3 * a.sd / std::sqrt(trials);
    const double slack_b = 3 * b.sd / std::sqrt(trials);
    const double bound_a = (1 - std::exp(-static_cast<double>(ell) / m)) * lp.value;
    const double bound_b = (1 - std::pow(1 - 1.0 / m, m)) * lp.value;
    const double secs = seconds_since(start);
    report(5, lp.converged && a.mean >= bound_a - slack_a && b.mean >= bound_b - slack_b && secs <= 300,
           fmt("coverage: E p(T) %.4f vs bound %.4f - %.4f; baseline %.4f vs bound %.4f - %.4f (x* %.4f, %.1f s)",
               a.mean, bound_a, slack_a, b.mean, bound_b, slack_b, lp.value, secs));
}

void ac6_hybrid_vs_baseline() {
    std::vector<GeneratorSpec> specs;
    for (int k = 0; k < 20; ++k) {
        specs.push_back({static_cast<Family>(k % 4), 60, 10, derive_seed(606, static_cast<std::uint64_t>(k)), {}});
    }
    BenchOptions opts;
    opts.eps = 0.001;
    opts.mk_mode = MkMode::Auto;
    opts.exact_oracle = false;
    const auto res = run_ratio_bench(specs, {Algorithm::Hybrid, Algorithm::Baseline}, 50, opts);
    const auto& d = res.hybrid_vs_baseline;
    bool feasible = true;
    for (const auto& row : res.rows) feasible = feasible && check_solution(res.instances[row.instance], row.solution).feasible();
    double hyb = 0, bas = 0;
    for (const auto& a : res.aggregates) {
        if (a.algorithm == Algorithm::Hybrid) hyb = a.mean_ratio_lp;
        if (a.algorithm == Algorithm::Baseline) bas = a.mean_ratio_lp;
    }
    const bool ok = d && feasible && d->mean >= -d->std_error;
    report(6, ok,
           fmt("hybrid vs baseline (ratio vs x*, %d pairs): hybrid %.4f, baseline %.4f, delta %.4f +- %.4f "
               "(95%% CI [%.4f, %.4f])",
               d ? d->pairs : 0, hyb, bas, d ? d->mean : 0.0, d ? d->std_error : 0.0,
               d ? d->mean - 1.96 * d->std_error : 0.0, d ? d->mean + 1.96 * d->std_error : 0.0));
}

void ac7_hybrid_floor(const std::vector<SuiteEntry>& suite) {
    const int trials = 200;
    std::vector<char> ok(suite.size(), 0);
    std::vector<double> means(suite.size(), 0.0);
    parallel_for(suite.size(), [&](std::size_t k) {
        const auto& e = suite[k];
        std::vector<double> ratios(trials);
        HybridParams p;
        p.eps = 0.01;
        p.mk_mode = MkMode::Exact;
        for (int t = 0; t < trials; ++t) {
            p.seed = derive_seed(700 + k, static_cast<std::uint64_t>(t));
            const double prof = solve_hybrid(e.inst, p, e.lp).report.profit;
            ratios[static_cast<std::size_t>(t)] = e.opt > 0 ? prof / e.opt : 1.0;
        }
        const auto s = mean_sd(ratios);
        means[k] = s.mean;
        ok[k] = s.mean >= 0.653 - 3 * s.sd / std::sqrt(trials);
    });
    const auto bad = std::count(ok.begin(), ok.end(), 0);
    const double overall = std::accumulate(means.begin(), means.end(), 0.0) / static_cast<double>(means.size());
    report(7, bad <= 1,
           fmt("hybrid floor 0.653: %ld of %zu instances below (allowed 1), mean ratio %.4f, min instance mean %.4f",
               static_cast<long>(bad), suite.size(), overall, *std::min_element(means.begin(), means.end())));
}

void ac8_first_fit() {
    Rng rng(8);
    int bad = 0;
    long pairs = 0;
    for (int t = 0; t < 1000; ++t) {
        const auto inst = generate({static_cast<Family>(t % 4), 5 + static_cast<int>(rng.below(60)), 1,
                                    derive_seed(88, static_cast<std::uint64_t>(t)), {}});
        std::vector<std::size_t> order(inst.size());
        std::iota(order.begin(), order.end(), 0);
        for (std::size_t k = order.size(); k > 1; --k) std::swap(order[k - 1], order[rng.below(k)]);
        const auto bins = first_fit_2d(inst, order, FirstFitOrder::Given);
        for (std::size_t b = 0; b + 1 < bins.size(); ++b) {
            const auto x = load_of(inst, bins[b]);
            const auto y = load_of(inst, bins[b + 1]);
            ++pairs;
            if (!(x.w1 + y.w1 + x.w2 + y.w2 > 1.0)) ++bad;
        }
        for (const auto& b : bins) {
            if (!is_feasible(inst, b)) ++bad;
        }
    }
    report(8, bad == 0, fmt("First-Fit consecutive pairs: %d violations over %ld pairs, 1000 lists", bad, pairs));
}

void ac9_concentration() {
    const int trials = 10000;
    int bad = 0, points = 0;
    std::string detail;
    const GeneratorSpec specs[] = {{Family::Uniform, 150, 100, 901, {}},
                                   {Family::Correlated, 120, 60, 902, {}},
                                   {Family::ZipfProfit, 100, 40, 903, {0.8}}};
    for (const auto& spec : specs) {
        const auto inst = generate(spec);
        const auto lp = solve_clp(inst, 1e-6);
        const int ell = default_ell(inst.bins());
        // mean / eta from an independent pilot run picks t so the bound is 0.5, 0.25, 0.1
        const auto pilot = run_concentration(inst, lp, ell, 200, {}, derive_seed(spec.seed, 999));
        const double z = pilot.mean / pilot.eta;
        std::vector<double> ts;
        for (double b : {0.5, 0.25, 0.1}) ts.push_back(t_for_bound(z, b));
        const auto rep = run_concentration(inst, lp, ell, trials, ts, spec.seed);
        for (const auto& p : rep.points) {
            ++points;
            if (!p.pass) ++bad;
            detail += fmt(" [%.3f<=%.3f]", p.empirical, p.bound);
        }
    }
    report(9, bad == 0, fmt("concentration: %d of %d tail points exceed bound + 3 SE; empirical<=bound:%s", bad,
                            points, detail.c_str()));
}

void ac10_degenerate(const std::vector<SuiteEntry>& suite) {
    int bad_red = 0, bad_base = 0;
    for (std::size_t k = 0; k < suite.size(); ++k) {
        const auto& e = suite[k];
        HybridParams p;
        p.eps = 0.01;
        p.mk_mode = MkMode::Exact;
        p.ell_override = 0;
        const double h = solve_hybrid(e.inst, p, e.lp).report.profit;
        const double r = solve_reduction(e.inst, 0.01, MkMode::Exact).report.profit;
        if (std::abs(h - r) > 1e-9) ++bad_red;
        p.ell_override = e.inst.bins();
        for (std::uint64_t s = 0; s < 10; ++s) {
            p.seed = derive_seed(k, s);
            if (!(solve_hybrid(e.inst, p, e.lp).solution == solve_sampling_baseline(e.inst, e.lp, p.seed).solution)) {
                ++bad_base;
            }
        }
    }
    report(10, bad_red == 0 && bad_base == 0,
           fmt("degenerate identities: ell=0 vs reduction %d mismatches; ell=m vs baseline %d mismatches", bad_red,
               bad_base));
}

}  // namespace

int main() {
    const auto start = Clock::now();
    auto suite = build_suite();
    ac1_oracles(suite);
    ac2_lp_bound(suite);
    ac3_reduction(suite);
    ac4_marginals();
    ac5_coverage();
    ac6_hybrid_vs_baseline();
    ac7_hybrid_floor(suite);
    ac8_first_fit();
    ac9_concentration();
    ac10_degenerate(suite);
    std::printf("%d of 10 criteria failed (%.1f s total)\n", failures, seconds_since(start));
    return failures == 0 ? 0 : 1;
}
