#pragma once

#include <cstdint>
#include <span>
#include <utility>
#include <vector>

#include "vmk/model.hpp"

namespace vmk {

// Uniform 1-D multiple knapsack. Item ids are indices into the 2VMK instance
// the MK instance was derived from, so solutions lift back without a lookup.
struct MkItem {
    std::size_t id = 0;
    double weight = 0.0;
    double profit = 0.0;
};

struct MkInstance {
    std::vector<MkItem> items;
    int bins = 0;
};

struct MkSolution {
    std::vector<std::vector<std::size_t>> bins;  // item ids

    bool operator==(const MkSolution&) const = default;
};

// k-associated instance: weights max(w1, w2), profits unchanged, k * m bins.
MkInstance associate(const Instance& inst, int k);
// Same over a subset of item indices, treated as an instance with `bins` bins.
MkInstance associate(const Instance& inst, std::span<const std::size_t> subset, int bins, int k = 1);

double mk_profit(const MkInstance& mk, const MkSolution& sol);
bool mk_feasible(const MkInstance& mk, const MkSolution& sol, double tol = kFeasTol);
// Every MK bin is also a 2-D bin of the source instance.
Solution lift(const MkSolution& sol);

// Splits a 2-D feasible configuration into the items heavier in dimension 1
// (w1 >= w2) and the rest; each half fits one unit bin under max(w1, w2).
// Throws InfeasibleInput if c is not 2-D feasible.
std::pair<Configuration, Configuration> split_configuration(const Instance& inst, const Configuration& c);

inline constexpr std::uint64_t kDefaultMkNodeCap = 20'000'000;

class MkBudgetExceeded : public SearchBudgetExceeded {
public:
    MkBudgetExceeded(MkSolution best, double upper_bound)
        : SearchBudgetExceeded("MK node cap exceeded"), best_(std::move(best)), upper_bound_(upper_bound) {}

    const MkSolution& best() const { return best_; }
    double upper_bound() const { return upper_bound_; }

private:
    MkSolution best_;
    double upper_bound_;
};

// Branch and bound over item-to-bin assignments. Bins are canonicalized in the
// output: nonempty bins sorted by smallest id, empty bins last.
// Throws MkBudgetExceeded carrying the incumbent and an LP upper bound.
MkSolution solve_mk_exact(const MkInstance& mk, std::uint64_t node_cap = kDefaultMkNodeCap);

// First-fit decreasing by density followed by insert / swap / move local search.
MkSolution solve_mk_heuristic(const MkInstance& mk);

// Density-ordered first fit without local search; the heuristic's starting point.
MkSolution mk_first_fit_decreasing(const MkInstance& mk);

enum class FirstFitOrder { Given, ByDensityDesc };

// Packs every item; opens a new bin whenever no open bin accommodates the next one.
std::vector<Configuration> first_fit_2d(const Instance& inst, FirstFitOrder order);
std::vector<Configuration> first_fit_2d(const Instance& inst, std::span<const std::size_t> items,
                                        FirstFitOrder order);

// p / (w1 + w2), +infinity for zero-weight items.
double density_2d(const Item& item);

}  // namespace vmk
