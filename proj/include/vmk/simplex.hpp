#pragma once

#include <cstddef>
#include <span>
#include <vector>

namespace vmk {

// Dense revised simplex for
//
//     max c^T x   s.t.  A x <= b,  x >= 0,  with b >= 0.
//
// The slack basis is the starting point, so no phase one is needed. Columns can
// be appended between calls to solve(); the current basis is kept and the next
// solve warm-starts from it. Entering variables follow Dantzig's rule with
// Bland's smallest-index rule for ties, and the solver drops to pure Bland
// pivoting after a run of degenerate steps so it cannot cycle.
class RevisedSimplex {
public:
    struct Entry {
        std::size_t row;
        double value;
    };

    enum class Status { Optimal, Unbounded, IterationLimit };

    explicit RevisedSimplex(std::vector<double> rhs);

    // Returns the structural column index.
    std::size_t add_column(double cost, std::vector<Entry> entries);

    Status solve(std::size_t max_iterations = 200000);

    std::size_t rows() const { return rhs_.size(); }
    std::size_t columns() const { return costs_.size(); }
    std::size_t iterations() const { return iterations_; }

    double objective() const;
    std::vector<double> primal() const;
    // One dual value per row, from the current basis.
    std::vector<double> duals() const;
    double reduced_cost(std::size_t column) const;

private:
    bool is_slack(std::size_t var) const { return var < rows(); }
    double var_cost(std::size_t var) const;
    void column_of(std::size_t var, std::vector<double>& dense) const;
    void compute_duals(std::vector<double>& y) const;
    void refactor();

    std::vector<double> rhs_;
    std::vector<double> costs_;
    std::vector<std::vector<Entry>> cols_;

    std::vector<double> binv_;  // rows x rows, row-major
    std::vector<std::size_t> basis_;
    std::vector<long> position_;  // var -> basis row, -1 if nonbasic
    std::vector<double> xb_;
    std::size_t iterations_ = 0;
    std::size_t since_refactor_ = 0;
};

}  // namespace vmk
