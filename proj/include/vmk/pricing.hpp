#pragma once

#include <cstdint>
#include <span>

#include "vmk/model.hpp"

namespace vmk {

inline constexpr std::uint64_t kDefaultPricingNodeCap = 10'000'000;

struct PricedColumn {
    Configuration config;
    double value = 0.0;           // sum of clamped values over config
    double optimality_gap = 0.0;  // 0 for exact pricing
};

class PricingBudgetExceeded : public SearchBudgetExceeded {
public:
    PricingBudgetExceeded(PricedColumn best, double upper_bound)
        : SearchBudgetExceeded("pricing node cap exceeded"),
          best_(std::move(best)),
          upper_bound_(upper_bound) {}

    const PricedColumn& best() const { return best_; }
    double upper_bound() const { return upper_bound_; }

private:
    PricedColumn best_;
    double upper_bound_;
};

// Maximizes sum_{i in C} max(values[i], 0) over configurations C of inst.
// `values` holds one entry per item index. Items with a nonpositive value are
// never chosen; zero-weight items with a positive value always are. Among
// equal-value optima the lexicographically smallest index set wins.
// Throws PricingBudgetExceeded when more than node_cap nodes are expanded.
PricedColumn price_exact(const Instance& inst, std::span<const double> values,
                         std::uint64_t node_cap = kDefaultPricingNodeCap);

// Profit-scaling variant: values are rounded down to multiples of
// eps * v_max / n and the scaled problem is solved exactly. The returned value
// is within a factor (1 - eps) of the optimum and optimality_gap bounds the
// absolute loss. Never throws on budget; falls back to greedy instead.
PricedColumn price_approx(const Instance& inst, std::span<const double> values, double eps,
                          std::uint64_t node_cap = kDefaultPricingNodeCap);

// Upper bound on the pricing optimum from the fractional relaxations.
double pricing_upper_bound(const Instance& inst, std::span<const double> values);

}  // namespace vmk
