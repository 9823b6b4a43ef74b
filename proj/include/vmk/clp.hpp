#pragma once

#include <cstdint>
#include <span>
#include <string>
#include <vector>

#include "vmk/model.hpp"
#include "vmk/pricing.hpp"
#include "vmk/rng.hpp"

namespace vmk {

struct IterationBudget {
    int max_rounds = 500;
    std::uint64_t pricing_node_cap = kDefaultPricingNodeCap;
};

// Solution of the configuration LP
//
//     max  sum_C x_C p(C)
//     s.t. sum_C x_C <= m,   sum_{C contains i} x_C <= 1 for every item i,   x >= 0
//
// restricted to `pool`. When `converged` is set, `value` is certified to be
// within a relative `certified_gap` of the true LP optimum via the Lagrangian
// bound `upper_bound`.
struct FractionalSolution {
    int bins = 1;
    std::vector<Configuration> pool;
    std::vector<double> mass;  // x_C, parallel to pool
    double value = 0.0;
    double bin_price = 0.0;           // dual of the bin-count row
    std::vector<double> item_prices;  // dual of each item row
    bool converged = false;
    double certified_gap = 0.0;
    double upper_bound = 0.0;
    int rounds = 0;

    double total_mass() const;
    // sum_{C contains i} x_C for each of the n items.
    std::vector<double> coverage(std::size_t items) const;
};

// Column generation: restricted master by revised simplex, columns from the
// exact pricing oracle on the dual-adjusted values p(i) - mu_i. The pool starts
// with every singleton, a greedy density column, and any `warm_pool` columns.
// Stops when the certified relative gap drops to eps or no column has positive
// reduced cost; stops with converged = false when the round budget runs out.
FractionalSolution solve_clp(const Instance& inst, double eps, const IterationBudget& budget = {},
                             std::span<const Configuration> warm_pool = {});

// Draws configurations with Pr[C] = x_C / m. Residual mass 1 - sum x_C / m
// goes to the empty configuration.
class ConfigurationSampler {
public:
    static constexpr std::size_t kEmpty = static_cast<std::size_t>(-1);

    explicit ConfigurationSampler(const FractionalSolution& fs);

    // Pool index of the drawn column, or kEmpty.
    std::size_t draw_index(Rng& rng) const;
    const Configuration& draw(Rng& rng) const;

    // Prefix sums over the support; the last entry (empty configuration) is 1.
    std::span<const double> cumulative() const { return cumulative_; }
    std::span<const std::size_t> support() const { return support_; }

private:
    const FractionalSolution* fs_;
    std::vector<std::size_t> support_;
    std::vector<double> cumulative_;
    Configuration empty_;
};

Configuration sample_configuration(const FractionalSolution& fs, Rng& rng);

struct SampledSet {
    std::vector<Configuration> configs;
    Configuration items;  // union of configs
};

SampledSet sample_T(const FractionalSolution& fs, int ell, Rng& rng);
SampledSet sample_T(const ConfigurationSampler& sampler, int ell, Rng& rng);

// Audit dump of the pool and masses.
std::string fractional_solution_json(const Instance& inst, const FractionalSolution& fs);

}  // namespace vmk
