#pragma once

#include <cstdint>
#include <filesystem>
#include <functional>
#include <optional>
#include <string>
#include <vector>

#include "vmk/clp.hpp"
#include "vmk/generator.hpp"
#include "vmk/solvers.hpp"

namespace vmk {

// Worker count from VMK_THREADS, else the hardware concurrency.
unsigned worker_count();

// Runs body(0..count-1) on worker_count() threads.
void parallel_for(std::size_t count, const std::function<void(std::size_t)>& body);

struct BenchOptions {
    double eps = 0.01;
    MkMode mk_mode = MkMode::Auto;
    bool exact_oracle = true;
    std::uint64_t exact_node_cap = 50'000'000;
};

struct BenchRow {
    SolveReport report;
    std::size_t instance = 0;  // index into the suite
    int n = 0;
    int m = 0;
    Solution solution;

    std::optional<double> ratio_opt() const;
    std::optional<double> ratio_lp() const;
};

struct AlgoAggregate {
    Algorithm algorithm = Algorithm::Hybrid;
    int rows = 0;
    double mean_profit = 0.0;
    double mean_ratio_opt = 0.0;
    double sd_ratio_opt = 0.0;
    int ratio_opt_rows = 0;
    double mean_ratio_lp = 0.0;
    double sd_ratio_lp = 0.0;
};

struct PairedDelta {
    int pairs = 0;
    double mean = 0.0;
    double std_error = 0.0;
    bool vs_opt = false;  // ratios against exactOpt, otherwise against x*
};

struct MarginalPoint {
    int j = 0;
    double q_hat = 0.0;
    double q_se = 0.0;
    double cumulative = 0.0;  // mean p(R_1 u ... u R_j)
    double overlay = 0.0;     // (x*/m) e^{-j/m}
};

struct MarginalCurve {
    double x_star = 0.0;
    int m = 0;
    int trials = 0;
    bool monotone = true;  // every trial's cumulative profit was nondecreasing
    std::vector<MarginalPoint> points;
};

struct ExperimentResult {
    std::vector<Instance> instances;
    std::vector<BenchRow> rows;
    std::vector<AlgoAggregate> aggregates;
    std::optional<PairedDelta> hybrid_vs_baseline;
    std::optional<MarginalCurve> marginal_curve;
    bool oracle_incomplete = false;
};

// Deterministic algorithms (reduction, exact, mck) run once per instance; the
// randomized ones run `trials` times with seeds derived from the generator seed.
// Exact ratios need solve_exact to finish; otherwise the result is flagged
// oracle_incomplete and ratios are reported against x* only.
ExperimentResult run_ratio_bench(const std::vector<GeneratorSpec>& suite, const std::vector<Algorithm>& algos,
                                 int trials, const BenchOptions& options = {});

std::vector<AlgoAggregate> aggregate_rows(const std::vector<BenchRow>& rows);
std::optional<PairedDelta> paired_hybrid_vs_baseline(const std::vector<BenchRow>& rows);

// Bench invariants: feasible rows, ratios within [0, 1 + tau], reduction rows at
// least 1/2 of OPT, hybrid not worse than baseline by more than one paired
// standard error. Returns one message per violated check.
std::vector<std::string> check_experiment(const ExperimentResult& result);

// q_hat_j: mean marginal profit of the j-th of m sampled configurations.
MarginalCurve run_marginal_curve(const Instance& inst, const FractionalSolution& lp, int trials, std::uint64_t seed);
MarginalCurve run_marginal_curve(const Instance& inst, int trials, std::uint64_t seed, double eps = 0.01);

struct TailPoint {
    double t = 0.0;
    double threshold = 0.0;  // mean - t * eta
    double empirical = 0.0;  // fraction of trials with p(T) <= threshold
    double bound = 1.0;      // exp(-t^2 / (2 mean / eta))
    double std_error = 0.0;  // binomial, at the bound
    bool pass = true;        // empirical <= bound + 3 std_error
};

struct ConcentrationReport {
    int ell = 0;
    int trials = 0;
    double eta = 0.0;  // max_C p(C)
    double mean = 0.0;
    double sd = 0.0;
    std::vector<TailPoint> points;

    bool pass() const;
};

// Lower tail of p(T) for T the union of ell sampled configurations, checked
// against the self-bounding tail bound with scaling eta = max_C p(C).
ConcentrationReport run_concentration(const Instance& inst, const FractionalSolution& lp, int ell, int trials,
                                      const std::vector<double>& t_values, std::uint64_t seed);

// t at which the lower-tail bound equals `bound`, for mean / eta = z.
double t_for_bound(double z, double bound);

// Output

std::string bench_csv_header();
std::string bench_csv(const ExperimentResult& result);
std::string experiment_json(const ExperimentResult& result);
std::string marginal_csv(const MarginalCurve& curve);
std::string marginal_json(const MarginalCurve& curve);
std::string concentration_json(const ConcentrationReport& rep);
std::string concentration_csv(const ConcentrationReport& rep);
std::string report_json(const SolveReport& report);

// Writes bench.csv, bench.json, instances/ and solutions/ under dir.
void write_experiment(const ExperimentResult& result, const std::filesystem::path& dir);

}  // namespace vmk
