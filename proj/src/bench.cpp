#include "vmk/bench.hpp"

#include <algorithm>
#include <atomic>
#include <cmath>
#include <cstdio>
#include <cstdlib>
#include <exception>
#include <mutex>
#include <sstream>
#include <thread>

#include <json.hpp>

#include "vmk/pricing.hpp"

namespace vmk {

namespace {

struct Stats {
    double mean = 0.0;
    double sd = 0.0;
};

Stats stats_of(const std::vector<double>& xs) {
    Stats s;
    if (xs.empty()) return s;
    for (double x : xs) s.mean += x;
    s.mean /= static_cast<double>(xs.size());
    if (xs.size() > 1) {
        double ss = 0.0;
        for (double x : xs) ss += (x - s.mean) * (x - s.mean);
        s.sd = std::sqrt(ss / static_cast<double>(xs.size() - 1));
    }
    return s;
}

std::optional<double> safe_ratio(double num, std::optional<double> den) {
    if (!den) return std::nullopt;
    if (*den <= 0.0) return num <= 0.0 ? std::optional<double>(1.0) : std::nullopt;
    return num / *den;
}

std::string fmt(double v) {
    char buf[40];
    std::snprintf(buf, sizeof(buf), "%.10g", v);
    return buf;
}

std::string opt_fmt(const std::optional<double>& v) { return v ? fmt(*v) : std::string(); }

bool is_randomized(Algorithm a) {
    return a == Algorithm::Hybrid || a == Algorithm::Baseline || a == Algorithm::EpsNice;
}

std::string solution_file(const BenchRow& row) {
    return "solutions/inst" + std::to_string(row.instance) + "_" + std::string(algorithm_name(row.report.algorithm)) +
           "_t" + std::to_string(row.report.trial_index) + ".json";
}

std::string instance_file(std::size_t idx) { return "instances/inst" + std::to_string(idx) + ".json"; }

}  // namespace

unsigned worker_count() {
    if (const char* env = std::getenv("VMK_THREADS")) {
        const long v = std::strtol(env, nullptr, 10);
        if (v >= 1) return static_cast<unsigned>(v);
    }
    return std::max(1u, std::thread::hardware_concurrency());
}

void parallel_for(std::size_t count, const std::function<void(std::size_t)>& body) {
    const unsigned workers = std::min<std::size_t>(worker_count(), std::max<std::size_t>(count, 1));
    if (workers <= 1) {
        for (std::size_t i = 0; i < count; ++i) body(i);
        return;
    }
    std::atomic<std::size_t> next{0};
    std::exception_ptr error;
    std::mutex error_mutex;
    std::vector<std::thread> pool;
    pool.reserve(workers);
    for (unsigned w = 0; w < workers; ++w) {
        pool.emplace_back([&] {
            for (std::size_t i = next++; i < count; i = next++) {
                try {
                    body(i);
                } catch (...) {
                    std::lock_guard lock(error_mutex);
                    if (!error) error = std::current_exception();
                }
            }
        });
    }
    for (auto& t : pool) t.join();
    if (error) std::rethrow_exception(error);
}

std::optional<double> BenchRow::ratio_opt() const { return safe_ratio(report.profit, report.exact_opt); }
std::optional<double> BenchRow::ratio_lp() const { return safe_ratio(report.profit, report.lp_value); }

ExperimentResult run_ratio_bench(const std::vector<GeneratorSpec>& suite, const std::vector<Algorithm>& algos,
                                 int trials, const BenchOptions& options) {
    ExperimentResult result;
    const auto count = suite.size();
    result.instances.resize(count);
    std::vector<FractionalSolution> lps(count);
    std::vector<std::optional<double>> opts(count);
    std::vector<char> incomplete(count, 0);

    parallel_for(count, [&](std::size_t s) {
        result.instances[s] = generate(suite[s]);
        lps[s] = solve_clp(result.instances[s], options.eps);
        if (options.exact_oracle) {
            auto ex = solve_exact(result.instances[s], options.exact_node_cap);
            if (ex.complete) {
                opts[s] = ex.profit;
            } else {
                incomplete[s] = 1;
            }
        }
    });
    result.oracle_incomplete = std::any_of(incomplete.begin(), incomplete.end(), [](char c) { return c != 0; });

    struct Task {
        std::size_t instance;
        Algorithm algo;
        int trial;
    };
    std::vector<Task> tasks;
    for (std::size_t s = 0; s < count; ++s) {
        for (auto a : algos) {
            const int reps = is_randomized(a) ? trials : 1;
            for (int t = 0; t < reps; ++t) tasks.push_back({s, a, t});
        }
    }

    std::vector<std::optional<BenchRow>> rows(tasks.size());
    parallel_for(tasks.size(), [&](std::size_t k) {
        const auto& task = tasks[k];
        const auto& inst = result.instances[task.instance];
        const auto& lp = lps[task.instance];
        const auto seed = is_randomized(task.algo) ? derive_seed(suite[task.instance].seed, task.trial)
                                                   : suite[task.instance].seed;
        SolveResult res;
        switch (task.algo) {
            case Algorithm::Hybrid: {
                HybridParams params;
                params.eps = std::min(options.eps, 0.49);
                params.seed = seed;
                params.mk_mode = options.mk_mode;
                res = solve_hybrid(inst, params, lp);
                break;
            }
            case Algorithm::Baseline:
                res = solve_sampling_baseline(inst, lp, seed);
                break;
            case Algorithm::Reduction:
                res = solve_reduction(inst, options.eps, options.mk_mode);
                break;
            case Algorithm::Exact: {
                auto ex = solve_exact(inst, options.exact_node_cap);
                res.solution = ex.solution;
                res.solution.bins.resize(static_cast<std::size_t>(inst.bins()));
                res.report.algorithm = Algorithm::Exact;
                res.report.profit = ex.profit;
                res.report.bins_used = static_cast<int>(bins_used(ex.solution));
                break;
            }
            case Algorithm::Mck: {
                if (inst.bins() > 4) return;  // d = 2m grows too fast
                auto mck = reduce_to_mck(inst);
                auto sol = solve_mck_exact(mck, options.exact_node_cap);
                res.solution = mck_to_solution(inst, mck, sol);
                res.report.algorithm = Algorithm::Mck;
                res.report.profit = solution_profit(inst, res.solution);
                res.report.bins_used = static_cast<int>(bins_used(res.solution));
                break;
            }
            case Algorithm::EpsNice: {
                HybridParams params;
                params.eps = std::min(options.eps, 0.49);
                params.seed = seed;
                params.mk_mode = options.mk_mode;
                auto inner = [&](const Instance& sub) { return solve_hybrid(sub, params).solution; };
                res = eps_nice_wrap(inst, options.eps, default_prefix_budget(inst, options.eps), inner);
                break;
            }
        }
        res.report.seed = seed;
        res.report.trial_index = task.trial;
        res.report.lp_value = lp.value;
        res.report.lp_bound = lp.upper_bound;
        res.report.lp_converged = lp.converged;
        res.report.exact_opt = opts[task.instance];
        BenchRow row;
        row.report = res.report;
        row.instance = task.instance;
        row.n = static_cast<int>(inst.size());
        row.m = inst.bins();
        row.solution = std::move(res.solution);
        rows[k] = std::move(row);
    });
    for (auto& r : rows) {
        if (r) result.rows.push_back(std::move(*r));
    }
    result.aggregates = aggregate_rows(result.rows);
    result.hybrid_vs_baseline = paired_hybrid_vs_baseline(result.rows);
    return result;
}

std::vector<AlgoAggregate> aggregate_rows(const std::vector<BenchRow>& rows) {
    std::vector<AlgoAggregate> out;
    for (auto a : {Algorithm::Hybrid, Algorithm::Baseline, Algorithm::Reduction, Algorithm::Exact, Algorithm::Mck,
                   Algorithm::EpsNice}) {
        std::vector<double> profit, r_opt, r_lp;
        for (const auto& row : rows) {
            if (row.report.algorithm != a) continue;
            profit.push_back(row.report.profit);
            if (auto r = row.ratio_opt()) r_opt.push_back(*r);
            if (auto r = row.ratio_lp()) r_lp.push_back(*r);
        }
        if (profit.empty()) continue;
        AlgoAggregate agg;
        agg.algorithm = a;
        agg.rows = static_cast<int>(profit.size());
        agg.mean_profit = stats_of(profit).mean;
        const auto so = stats_of(r_opt), sl = stats_of(r_lp);
        agg.mean_ratio_opt = so.mean;
        agg.sd_ratio_opt = so.sd;
        agg.ratio_opt_rows = static_cast<int>(r_opt.size());
        agg.mean_ratio_lp = sl.mean;
        agg.sd_ratio_lp = sl.sd;
        out.push_back(agg);
    }
    return out;
}

std::optional<PairedDelta> paired_hybrid_vs_baseline(const std::vector<BenchRow>& rows) {
    std::vector<const BenchRow*> hybrid, baseline;
    for (const auto& row : rows) {
        if (row.report.algorithm == Algorithm::Hybrid) hybrid.push_back(&row);
        if (row.report.algorithm == Algorithm::Baseline) baseline.push_back(&row);
    }
    if (hybrid.empty() || baseline.empty()) return std::nullopt;
    const bool vs_opt = std::all_of(rows.begin(), rows.end(), [](const BenchRow& r) {
        return r.report.algorithm != Algorithm::Hybrid || r.ratio_opt().has_value();
    });
    std::vector<double> deltas;
    for (const auto* h : hybrid) {
        for (const auto* b : baseline) {
            if (b->instance != h->instance || b->report.trial_index != h->report.trial_index) continue;
            const auto rh = vs_opt ? h->ratio_opt() : h->ratio_lp();
            const auto rb = vs_opt ? b->ratio_opt() : b->ratio_lp();
            if (rh && rb) deltas.push_back(*rh - *rb);
        }
    }
    if (deltas.empty()) return std::nullopt;
    const auto st = stats_of(deltas);
    PairedDelta d;
    d.pairs = static_cast<int>(deltas.size());
    d.mean = st.mean;
    d.std_error = st.sd / std::sqrt(static_cast<double>(deltas.size()));
    d.vs_opt = vs_opt;
    return d;
}

std::vector<std::string> check_experiment(const ExperimentResult& result) {
    std::vector<std::string> failures;
    for (const auto& row : result.rows) {
        const auto& inst = result.instances.at(row.instance);
        const auto rep = check_solution(inst, row.solution);
        const std::string tag = std::string(algorithm_name(row.report.algorithm)) + " instance " +
                                std::to_string(row.instance) + " trial " + std::to_string(row.report.trial_index);
        if (!rep.feasible()) failures.push_back(tag + ": infeasible solution");
        if (std::abs(rep.profit - row.report.profit) > 1e-9) failures.push_back(tag + ": profit mismatch");
        if (auto r = row.ratio_opt(); r && (*r < 0.0 || *r > 1.0 + kLpTol)) {
            failures.push_back(tag + ": ratio vs OPT " + fmt(*r) + " outside [0, 1 + tau]");
        }
        if (row.report.lp_bound && row.report.lp_converged &&
            row.report.profit > *row.report.lp_bound * (1.0 + kLpTol) + kLpTol) {
            failures.push_back(tag + ": profit exceeds the LP bound");
        }
        if (row.report.algorithm == Algorithm::Reduction) {
            if (auto r = row.ratio_opt(); r && *r < 0.5 - 1e-9) {
                failures.push_back(tag + ": reduction ratio " + fmt(*r) + " below 1/2");
            }
        }
    }
    if (result.hybrid_vs_baseline) {
        const auto& d = *result.hybrid_vs_baseline;
        if (d.mean < -d.std_error) {
            failures.push_back("hybrid vs baseline: paired mean delta " + fmt(d.mean) + " below -1 SE (" +
                               fmt(d.std_error) + ")");
        }
    }
    return failures;
}

MarginalCurve run_marginal_curve(const Instance& inst, const FractionalSolution& lp, int trials, std::uint64_t seed) {
    const int m = inst.bins();
    MarginalCurve curve;
    curve.x_star = lp.value;
    curve.m = m;
    curve.trials = trials;
    std::vector<std::vector<double>> marg(static_cast<std::size_t>(m), std::vector<double>(static_cast<std::size_t>(trials)));
    std::vector<std::vector<double>> cum(static_cast<std::size_t>(m), std::vector<double>(static_cast<std::size_t>(trials)));
    std::atomic<bool> monotone{true};
    ConfigurationSampler sampler(lp);
    parallel_for(static_cast<std::size_t>(trials), [&](std::size_t t) {
        Rng rng(derive_seed(seed, t));
        std::vector<char> covered(inst.size(), 0);
        double total = 0.0;
        for (int j = 0; j < m; ++j) {
            const double before = total;
            for (auto i : sampler.draw(rng)) {
                if (!covered[i]) {
                    covered[i] = 1;
                    total += inst.item(i).profit;
                }
            }
            if (total < before) monotone = false;
            marg[static_cast<std::size_t>(j)][t] = total - before;
            cum[static_cast<std::size_t>(j)][t] = total;
        }
    });
    curve.monotone = monotone;
    for (int j = 1; j <= m; ++j) {
        const auto sm = stats_of(marg[static_cast<std::size_t>(j - 1)]);
        MarginalPoint p;
        p.j = j;
        p.q_hat = sm.mean;
        p.q_se = trials > 0 ? sm.sd / std::sqrt(static_cast<double>(trials)) : 0.0;
        p.cumulative = stats_of(cum[static_cast<std::size_t>(j - 1)]).mean;
        p.overlay = lp.value / m * std::exp(-static_cast<double>(j) / m);
        curve.points.push_back(p);
    }
    return curve;
}

MarginalCurve run_marginal_curve(const Instance& inst, int trials, std::uint64_t seed, double eps) {
    const auto lp = solve_clp(inst, eps);
    return run_marginal_curve(inst, lp, trials, seed);
}

bool ConcentrationReport::pass() const {
    return std::all_of(points.begin(), points.end(), [](const TailPoint& p) { return p.pass; });
}

double t_for_bound(double z, double bound) { return std::sqrt(2.0 * z * std::log(1.0 / bound)); }

ConcentrationReport run_concentration(const Instance& inst, const FractionalSolution& lp, int ell, int trials,
                                      const std::vector<double>& t_values, std::uint64_t seed) {
    if (ell < 0 || ell > inst.bins()) throw std::invalid_argument("run_concentration: ell must lie in [0, m]");
    if (trials < 100) throw std::invalid_argument("run_concentration: need at least 100 trials");
    ConcentrationReport rep;
    rep.ell = ell;
    rep.trials = trials;
    std::vector<double> profits(inst.size());
    for (std::size_t i = 0; i < inst.size(); ++i) profits[i] = inst.item(i).profit;
    try {
        rep.eta = price_exact(inst, profits).value;
    } catch (const PricingBudgetExceeded& e) {
        rep.eta = e.upper_bound();
    }

    std::vector<double> samples(static_cast<std::size_t>(trials));
    ConfigurationSampler sampler(lp);
    parallel_for(samples.size(), [&](std::size_t t) {
        Rng rng(derive_seed(seed, t));
        samples[t] = profit_of(inst, sample_T(sampler, ell, rng).items);
    });
    const auto st = stats_of(samples);
    rep.mean = st.mean;
    rep.sd = st.sd;

    for (double t : t_values) {
        TailPoint p;
        p.t = t;
        p.threshold = rep.mean - t * rep.eta;
        const auto hits = std::count_if(samples.begin(), samples.end(),
                                        [&](double x) { return x <= p.threshold; });
        p.empirical = static_cast<double>(hits) / trials;
        if (t > 0.0 && rep.eta > 0.0 && rep.mean > 0.0) {
            p.bound = std::exp(-t * t / (2.0 * rep.mean / rep.eta));
        } else {
            p.bound = 1.0;
        }
        p.std_error = std::sqrt(p.bound * (1.0 - p.bound) / trials);
        p.pass = p.empirical <= p.bound + 3.0 * p.std_error;
        rep.points.push_back(p);
    }
    return rep;
}

std::string bench_csv_header() {
    return "algo,seed,trial,n,m,profit,x_star,exact_opt,ratio_opt,ratio_lp,wall_ms,bins_used,converged";
}

std::string bench_csv(const ExperimentResult& result) {
    std::ostringstream out;
    out << bench_csv_header() << '\n';
    for (const auto& row : result.rows) {
        const auto& r = row.report;
        out << algorithm_name(r.algorithm) << ',' << r.seed << ',' << r.trial_index << ',' << row.n << ','
            << row.m << ',' << fmt(r.profit) << ',' << opt_fmt(r.lp_value) << ',' << opt_fmt(r.exact_opt) << ','
            << opt_fmt(row.ratio_opt()) << ',' << opt_fmt(row.ratio_lp()) << ',' << fmt(r.wall_ms) << ','
            << r.bins_used << ',' << (r.lp_converged ? "true" : "false") << '\n';
    }
    return out.str();
}

std::string report_json(const SolveReport& r) {
    nlohmann::json j{{"algorithm", algorithm_name(r.algorithm)},
                     {"seed", r.seed},
                     {"rng", r.rng_algorithm},
                     {"trial", r.trial_index},
                     {"profit", r.profit},
                     {"lp_converged", r.lp_converged},
                     {"wall_ms", r.wall_ms},
                     {"bins_used", r.bins_used},
                     {"ell", r.ell},
                     {"sampled_profit", r.sampled_profit}};
    j["x_star"] = r.lp_value ? nlohmann::json(*r.lp_value) : nlohmann::json(nullptr);
    j["lp_bound"] = r.lp_bound ? nlohmann::json(*r.lp_bound) : nlohmann::json(nullptr);
    j["exact_opt"] = r.exact_opt ? nlohmann::json(*r.exact_opt) : nlohmann::json(nullptr);
    return j.dump();
}

std::string experiment_json(const ExperimentResult& result) {
    nlohmann::json rows = nlohmann::json::array();
    for (const auto& row : result.rows) {
        auto j = nlohmann::json::parse(report_json(row.report));
        j["instance"] = row.instance;
        j["n"] = row.n;
        j["m"] = row.m;
        j["instance_file"] = instance_file(row.instance);
        j["solution_file"] = solution_file(row);
        rows.push_back(std::move(j));
    }
    nlohmann::json aggs = nlohmann::json::array();
    for (const auto& a : result.aggregates) {
        aggs.push_back({{"algorithm", algorithm_name(a.algorithm)},
                        {"rows", a.rows},
                        {"mean_profit", a.mean_profit},
                        {"mean_ratio_opt", a.mean_ratio_opt},
                        {"sd_ratio_opt", a.sd_ratio_opt},
                        {"ratio_opt_rows", a.ratio_opt_rows},
                        {"mean_ratio_lp", a.mean_ratio_lp},
                        {"sd_ratio_lp", a.sd_ratio_lp}});
    }
    nlohmann::json doc{{"rows", std::move(rows)},
                       {"aggregates", std::move(aggs)},
                       {"oracle_incomplete", result.oracle_incomplete}};
    if (result.hybrid_vs_baseline) {
        const auto& d = *result.hybrid_vs_baseline;
        doc["hybrid_vs_baseline"] = {{"pairs", d.pairs},
                                     {"mean_delta", d.mean},
                                     {"std_error", d.std_error},
                                     {"ci95_low", d.mean - 1.96 * d.std_error},
                                     {"ci95_high", d.mean + 1.96 * d.std_error},
                                     {"vs", d.vs_opt ? "exact_opt" : "x_star"}};
    }
    return doc.dump(2);
}

std::string marginal_csv(const MarginalCurve& curve) {
    std::ostringstream out;
    out << "j,q_hat,q_se,cumulative,overlay\n";
    for (const auto& p : curve.points) {
        out << p.j << ',' << fmt(p.q_hat) << ',' << fmt(p.q_se) << ',' << fmt(p.cumulative) << ','
            << fmt(p.overlay) << '\n';
    }
    return out.str();
}

std::string marginal_json(const MarginalCurve& curve) {
    nlohmann::json pts = nlohmann::json::array();
    for (const auto& p : curve.points) {
        pts.push_back({{"j", p.j}, {"q_hat", p.q_hat}, {"q_se", p.q_se}, {"cumulative", p.cumulative},
                       {"overlay", p.overlay}});
    }
    return nlohmann::json{{"x_star", curve.x_star},
                          {"m", curve.m},
                          {"trials", curve.trials},
                          {"monotone", curve.monotone},
                          {"points", std::move(pts)}}
        .dump(2);
}

std::string concentration_json(const ConcentrationReport& rep) {
    nlohmann::json pts = nlohmann::json::array();
    for (const auto& p : rep.points) {
        pts.push_back({{"t", p.t},
                       {"threshold", p.threshold},
                       {"empirical", p.empirical},
                       {"bound", p.bound},
                       {"std_error", p.std_error},
                       {"pass", p.pass}});
    }
    return nlohmann::json{{"ell", rep.ell},
                          {"trials", rep.trials},
                          {"eta", rep.eta},
                          {"mean", rep.mean},
                          {"sd", rep.sd},
                          {"pass", rep.pass()},
                          {"points", std::move(pts)}}
        .dump(2);
}

std::string concentration_csv(const ConcentrationReport& rep) {
    std::ostringstream out;
    out << "t,threshold,empirical,bound,std_error,pass\n";
    for (const auto& p : rep.points) {
        out << fmt(p.t) << ',' << fmt(p.threshold) << ',' << fmt(p.empirical) << ',' << fmt(p.bound) << ','
            << fmt(p.std_error) << ',' << (p.pass ? "true" : "false") << '\n';
    }
    return out.str();
}

void write_experiment(const ExperimentResult& result, const std::filesystem::path& dir) {
    std::filesystem::create_directories(dir);
    write_file(dir / "bench.csv", bench_csv(result));
    write_file(dir / "bench.json", experiment_json(result));
    for (std::size_t s = 0; s < result.instances.size(); ++s) {
        save_instance(result.instances[s], dir / instance_file(s));
    }
    for (const auto& row : result.rows) {
        write_file(dir / solution_file(row), solution_json(result.instances.at(row.instance), row.solution));
    }
}

}  // namespace vmk
