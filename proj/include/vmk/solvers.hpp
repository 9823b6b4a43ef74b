#pragma once

#include <cstdint>
#include <functional>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "vmk/clp.hpp"
#include "vmk/mk.hpp"
#include "vmk/model.hpp"
#include "vmk/rng.hpp"

namespace vmk {

enum class Algorithm { Hybrid, Baseline, Reduction, Exact, Mck, EpsNice };
enum class MkMode { Exact, Heuristic, Auto };

std::string_view algorithm_name(Algorithm a);
std::optional<Algorithm> parse_algorithm(std::string_view name);
std::string_view mk_mode_name(MkMode mode);
std::optional<MkMode> parse_mk_mode(std::string_view name);

struct SolveReport {
    Algorithm algorithm = Algorithm::Hybrid;
    std::uint64_t seed = 0;
    std::string rng_algorithm{Rng::kAlgorithm};
    int trial_index = 0;
    double profit = 0.0;
    std::optional<double> lp_value;  // x*
    std::optional<double> lp_bound;  // certified upper bound on the C-LP optimum
    bool lp_converged = false;
    std::optional<double> exact_opt;
    double wall_ms = 0.0;
    int bins_used = 0;
    int ell = 0;                  // configurations taken from the sampler
    double sampled_profit = 0.0;  // p(T) of the sampled part
};

struct SolveResult {
    Solution solution;
    SolveReport report;
};

struct HybridParams {
    double eps = 0.1;
    std::uint64_t seed = 0;
    std::optional<int> ell_override;
    IterationBudget clp_budget;
    MkMode mk_mode = MkMode::Auto;
};

// ceil(m ln 2)
int default_ell(int m);

// Auto picks the exact solver for residual instances with at most 18 items or
// at most 2 bins. Exact runs that hit their node cap fall back to the better of
// the incumbent and the heuristic.
MkSolution solve_mk(const MkInstance& mk, MkMode mode);

// Samples ell configurations from the C-LP solution, removes their items, and
// fills the remaining m - ell bins by solving the 1-associated MK instance of
// the leftover items. The overload taking `lp` skips the LP solve.
SolveResult solve_hybrid(const Instance& inst, const HybridParams& params);
SolveResult solve_hybrid(const Instance& inst, const HybridParams& params, const FractionalSolution& lp);

// m independent draws from the C-LP solution.
SolveResult solve_sampling_baseline(const Instance& inst, double eps, std::uint64_t seed,
                                    const IterationBudget& budget = {});
SolveResult solve_sampling_baseline(const Instance& inst, const FractionalSolution& lp, std::uint64_t seed);

// Solves the 1-associated MK instance with m bins and returns its bins.
SolveResult solve_reduction(const Instance& inst, double eps, MkMode mode = MkMode::Exact);

using InnerSolver = std::function<Solution(const Instance&)>;

// min(eps^-40, 0.1 * sum_i (w1(i) + w2(i)))
double default_prefix_budget(const Instance& inst, double eps);

// Takes the densest items (by p / (w1 + w2)) while their total w1 + w2 stays
// below prefix_budget, packs them by First-Fit, solves the rest with `inner`,
// and keeps the m most profitable bins of both packings.
SolveResult eps_nice_wrap(const Instance& inst, double eps, double prefix_budget, const InnerSolver& inner);

struct NicenessReport {
    bool nice = false;
    bool bins_condition = false;
    bool profit_condition = false;
    double max_config_profit_bound = 0.0;
    // ln ln ln of the bin threshold, i.e. eps^-30; the threshold itself overflows.
    double m_threshold_logloglog = 0.0;
    double m_logloglog = 0.0;  // -inf when m <= e^e
};

NicenessReport is_eps_nice(const Instance& inst, double eps, double opt_estimate);

// 2m-dimensional multiple-choice knapsack: one class per item, one copy per
// bin. Copy (i, r) has weight w1(i), w2(i) in coordinates 2r, 2r + 1 (0-based).
struct MckCopy {
    std::size_t item = 0;
    int bin = 0;
    std::vector<double> weight;
    double profit = 0.0;
};

struct McKInstance {
    int dimensions = 0;
    std::vector<std::vector<MckCopy>> classes;
};

struct MckSolution {
    std::vector<std::pair<std::size_t, std::size_t>> chosen;  // (class, copy)
    double profit = 0.0;
    bool complete = true;
};

McKInstance reduce_to_mck(const Instance& inst);
MckSolution solve_mck_exact(const McKInstance& mck, std::uint64_t node_cap = 50'000'000);
Solution mck_to_solution(const Instance& inst, const McKInstance& mck, const MckSolution& sol);

struct ExactResult {
    Solution solution;
    double profit = 0.0;
    bool complete = false;
};

// Branch and bound over assign-or-skip decisions. complete == true means the
// profit is optimal.
ExactResult solve_exact(const Instance& inst, std::uint64_t node_cap = 50'000'000);

}  // namespace vmk
