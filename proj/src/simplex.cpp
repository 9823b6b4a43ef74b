#include "vmk/simplex.hpp"

#include <cmath>
#include <stdexcept>

namespace vmk {

namespace {

constexpr double kOptTol = 1e-9;
constexpr double kPivotTol = 1e-9;
constexpr double kZeroStep = 1e-12;
constexpr std::size_t kRefactorEvery = 64;
constexpr std::size_t kDegenerateLimit = 50;

}  // namespace

RevisedSimplex::RevisedSimplex(std::vector<double> rhs) : rhs_(std::move(rhs)) {
    const auto m = rhs_.size();
    for (double b : rhs_) {
        if (!(b >= 0.0)) throw std::invalid_argument("simplex: right-hand side must be nonnegative");
    }
    binv_.assign(m * m, 0.0);
    for (std::size_t i = 0; i < m; ++i) binv_[i * m + i] = 1.0;
    basis_.resize(m);
    position_.assign(m, -1);
    for (std::size_t i = 0; i < m; ++i) {
        basis_[i] = i;
        position_[i] = static_cast<long>(i);
    }
    xb_ = rhs_;
}

std::size_t RevisedSimplex::add_column(double cost, std::vector<Entry> entries) {
    for (const auto& e : entries) {
        if (e.row >= rows()) throw std::out_of_range("simplex: column entry row out of range");
    }
    costs_.push_back(cost);
    cols_.push_back(std::move(entries));
    position_.push_back(-1);
    return costs_.size() - 1;
}

double RevisedSimplex::var_cost(std::size_t var) const {
    return is_slack(var) ? 0.0 : costs_[var - rows()];
}

void RevisedSimplex::column_of(std::size_t var, std::vector<double>& dense) const {
    dense.assign(rows(), 0.0);
    if (is_slack(var)) {
        dense[var] = 1.0;
        return;
    }
    for (const auto& e : cols_[var - rows()]) dense[e.row] += e.value;
}

void RevisedSimplex::compute_duals(std::vector<double>& y) const {
    const auto m = rows();
    y.assign(m, 0.0);
    for (std::size_t i = 0; i < m; ++i) {
        const double cb = var_cost(basis_[i]);
        if (cb == 0.0) continue;
        const double* row = &binv_[i * m];
        for (std::size_t j = 0; j < m; ++j) y[j] += cb * row[j];
    }
}

void RevisedSimplex::refactor() {
    const auto m = rows();
    // Gauss-Jordan on [B | I] with partial pivoting.
    std::vector<double> a(m * m, 0.0);
    std::vector<double> col;
    for (std::size_t k = 0; k < m; ++k) {
        column_of(basis_[k], col);
        for (std::size_t i = 0; i < m; ++i) a[i * m + k] = col[i];
    }
    std::vector<double> inv(m * m, 0.0);
    for (std::size_t i = 0; i < m; ++i) inv[i * m + i] = 1.0;

    for (std::size_t c = 0; c < m; ++c) {
        std::size_t piv = c;
        double best = std::abs(a[c * m + c]);
        for (std::size_t r = c + 1; r < m; ++r) {
            if (std::abs(a[r * m + c]) > best) {
                best = std::abs(a[r * m + c]);
                piv = r;
            }
        }
        if (best < 1e-14) throw std::runtime_error("simplex: singular basis during refactorization");
        if (piv != c) {
            for (std::size_t j = 0; j < m; ++j) {
                std::swap(a[c * m + j], a[piv * m + j]);
                std::swap(inv[c * m + j], inv[piv * m + j]);
            }
        }
        const double d = a[c * m + c];
        for (std::size_t j = 0; j < m; ++j) {
            a[c * m + j] /= d;
            inv[c * m + j] /= d;
        }
        for (std::size_t r = 0; r < m; ++r) {
            if (r == c) continue;
            const double f = a[r * m + c];
            if (f == 0.0) continue;
            for (std::size_t j = 0; j < m; ++j) {
                a[r * m + j] -= f * a[c * m + j];
                inv[r * m + j] -= f * inv[c * m + j];
            }
        }
    }
    binv_ = std::move(inv);
    for (std::size_t i = 0; i < m; ++i) {
        double v = 0.0;
        for (std::size_t j = 0; j < m; ++j) v += binv_[i * m + j] * rhs_[j];
        xb_[i] = std::abs(v) < kZeroStep ? 0.0 : v;
    }
    since_refactor_ = 0;
}

RevisedSimplex::Status RevisedSimplex::solve(std::size_t max_iterations) {
    const auto m = rows();
    if (m == 0) return Status::Optimal;
    std::vector<double> y;
    std::vector<double> u(m);
    std::size_t degenerate_run = 0;
    bool bland = false;

    for (std::size_t iter = 0; iter < max_iterations; ++iter) {
        if (since_refactor_ >= kRefactorEvery) refactor();
        compute_duals(y);

        // Entering variable.
        const std::size_t total = m + columns();
        std::size_t entering = total;
        double best_d = kOptTol;
        for (std::size_t v = 0; v < total; ++v) {
            if (position_[v] >= 0) continue;
            double d;
            if (is_slack(v)) {
                d = -y[v];
            } else {
                d = costs_[v - m];
                for (const auto& e : cols_[v - m]) d -= y[e.row] * e.value;
            }
            if (d > best_d) {
                best_d = d;
                entering = v;
                if (bland) break;
            }
        }
        if (entering == total) return Status::Optimal;

        // u = B^{-1} a_q
        if (is_slack(entering)) {
            for (std::size_t i = 0; i < m; ++i) u[i] = binv_[i * m + entering];
        } else {
            for (std::size_t i = 0; i < m; ++i) {
                double s = 0.0;
                const double* row = &binv_[i * m];
                for (const auto& e : cols_[entering - m]) s += row[e.row] * e.value;
                u[i] = s;
            }
        }

        // Ratio test; ties go to the smallest basic variable index.
        std::size_t leave = m;
        double best_t = 0.0;
        for (std::size_t i = 0; i < m; ++i) {
            if (u[i] <= kPivotTol) continue;
            const double t = std::max(xb_[i], 0.0) / u[i];
            if (leave == m || t < best_t - kZeroStep) {
                best_t = t;
                leave = i;
            } else if (t <= best_t + kZeroStep && basis_[i] < basis_[leave]) {
                best_t = std::min(best_t, t);
                leave = i;
            }
        }
        if (leave == m) return Status::Unbounded;

        if (best_t <= kZeroStep) {
            if (++degenerate_run > kDegenerateLimit) bland = true;
        } else {
            degenerate_run = 0;
            bland = false;
        }

        for (std::size_t i = 0; i < m; ++i) {
            if (i == leave) continue;
            xb_[i] -= best_t * u[i];
            if (std::abs(xb_[i]) < kZeroStep) xb_[i] = 0.0;
        }
        xb_[leave] = best_t;

        const double piv = u[leave];
        double* prow = &binv_[leave * m];
        for (std::size_t j = 0; j < m; ++j) prow[j] /= piv;
        for (std::size_t i = 0; i < m; ++i) {
            if (i == leave || u[i] == 0.0) continue;
            const double f = u[i];
            double* row = &binv_[i * m];
            for (std::size_t j = 0; j < m; ++j) row[j] -= f * prow[j];
        }

        position_[basis_[leave]] = -1;
        basis_[leave] = entering;
        position_[entering] = static_cast<long>(leave);
        ++iterations_;
        ++since_refactor_;
    }
    return Status::IterationLimit;
}

double RevisedSimplex::objective() const {
    double z = 0.0;
    for (std::size_t i = 0; i < rows(); ++i) z += var_cost(basis_[i]) * xb_[i];
    return z;
}

std::vector<double> RevisedSimplex::primal() const {
    std::vector<double> x(columns(), 0.0);
    for (std::size_t i = 0; i < rows(); ++i) {
        if (!is_slack(basis_[i])) x[basis_[i] - rows()] = std::max(xb_[i], 0.0);
    }
    return x;
}

std::vector<double> RevisedSimplex::duals() const {
    std::vector<double> y;
    compute_duals(y);
    return y;
}

double RevisedSimplex::reduced_cost(std::size_t column) const {
    auto y = duals();
    double d = costs_.at(column);
    for (const auto& e : cols_[column]) d -= y[e.row] * e.value;
    return d;
}

}  // namespace vmk
