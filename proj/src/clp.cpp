#include "vmk/clp.hpp"

#include <algorithm>
#include <cmath>
#include <set>
#include <stdexcept>

#include <json.hpp>

#include "vmk/simplex.hpp"

namespace vmk {

namespace {

Configuration greedy_column(const Instance& inst) {
    std::vector<std::size_t> order(inst.size());
    for (std::size_t i = 0; i < order.size(); ++i) order[i] = i;
    auto density = [&](std::size_t i) {
        const auto& it = inst.item(i);
        const double w = it.w1 + it.w2;
        return w > 0.0 ? it.profit / w : INFINITY;
    };
    std::stable_sort(order.begin(), order.end(),
                     [&](std::size_t a, std::size_t b) { return density(a) > density(b); });
    double r1 = 1.0, r2 = 1.0;
    std::vector<std::size_t> chosen;
    for (auto i : order) {
        const auto& it = inst.item(i);
        if (it.profit <= 0.0) continue;
        if (it.w1 <= r1 + kFeasTol && it.w2 <= r2 + kFeasTol) {
            chosen.push_back(i);
            r1 -= it.w1;
            r2 -= it.w2;
        }
    }
    return Configuration(std::move(chosen));
}

std::vector<RevisedSimplex::Entry> column_entries(const Configuration& c) {
    std::vector<RevisedSimplex::Entry> entries;
    entries.reserve(c.size() + 1);
    entries.push_back({0, 1.0});
    for (auto i : c) entries.push_back({i + 1, 1.0});
    return entries;
}

}  // namespace

double FractionalSolution::total_mass() const {
    double s = 0.0;
    for (double x : mass) s += x;
    return s;
}

std::vector<double> FractionalSolution::coverage(std::size_t items) const {
    std::vector<double> cov(items, 0.0);
    for (std::size_t k = 0; k < pool.size(); ++k) {
        if (mass[k] <= 0.0) continue;
        for (auto i : pool[k]) cov[i] += mass[k];
    }
    return cov;
}

FractionalSolution solve_clp(const Instance& inst, double eps, const IterationBudget& budget,
                             std::span<const Configuration> warm_pool) {
    if (!(eps > 0.0 && eps < 1.0)) throw std::invalid_argument("solve_clp: eps must be in (0,1)");
    const auto n = inst.size();
    const double m = inst.bins();

    FractionalSolution fs;
    fs.bins = inst.bins();
    fs.item_prices.assign(n, 0.0);
    if (n == 0) {
        fs.converged = true;
        return fs;
    }

    std::vector<double> rhs(n + 1, 1.0);
    rhs[0] = m;
    RevisedSimplex lp(std::move(rhs));
    std::set<Configuration> seen;
    auto add = [&](Configuration c) {
        if (c.empty() || !seen.insert(c).second) return false;
        if (!is_feasible(inst, c)) throw InfeasibleInput("solve_clp: infeasible pool column");
        lp.add_column(profit_of(inst, c), column_entries(c));
        fs.pool.push_back(std::move(c));
        return true;
    };
    for (const auto& c : warm_pool) add(c);
    for (std::size_t i = 0; i < n; ++i) add(Configuration{i});
    add(greedy_column(inst));

    std::vector<double> values(n);
    double best_ub = INFINITY;
    bool budget_hit = true;
    bool optimal = false;
    for (int round = 0; round < budget.max_rounds; ++round) {
        fs.rounds = round + 1;
        if (lp.solve() != RevisedSimplex::Status::Optimal) {
            throw std::runtime_error("solve_clp: restricted master did not reach optimality");
        }
        const auto y = lp.duals();
        const double lambda = std::max(y[0], 0.0);
        double mu_sum = 0.0;
        for (std::size_t i = 0; i < n; ++i) {
            const double mu = std::max(y[i + 1], 0.0);
            values[i] = inst.item(i).profit - mu;
            mu_sum += mu;
        }

        PricedColumn col;
        double pricing_ub;
        try {
            col = price_exact(inst, values, budget.pricing_node_cap);
            pricing_ub = col.value;
        } catch (const PricingBudgetExceeded& e) {
            col = e.best();
            pricing_ub = e.upper_bound();
        }
        best_ub = std::min(best_ub, mu_sum + m * std::max(pricing_ub, 0.0));

        const double value = lp.objective();
        const double gap = best_ub > 0.0 ? std::max(0.0, (best_ub - value) / best_ub) : 0.0;
        const bool no_improving = pricing_ub - lambda <= kLpTol;
        if (gap <= eps || no_improving) {
            budget_hit = false;
            optimal = no_improving;
            break;
        }
        if (col.value - lambda <= kLpTol || !add(std::move(col.config))) {
            // Only the budget-limited bound is left open; no usable column.
            budget_hit = false;
            break;
        }
    }
    if (budget_hit && lp.solve() != RevisedSimplex::Status::Optimal) {
        throw std::runtime_error("solve_clp: restricted master did not reach optimality");
    }

    const auto y = lp.duals();
    fs.bin_price = std::max(y[0], 0.0);
    for (std::size_t i = 0; i < n; ++i) fs.item_prices[i] = std::max(y[i + 1], 0.0);
    fs.mass = lp.primal();
    fs.value = lp.objective();
    fs.upper_bound = std::max(best_ub, fs.value);
    fs.certified_gap =
        fs.upper_bound > 0.0 ? std::max(0.0, (fs.upper_bound - fs.value) / fs.upper_bound) : 0.0;

    fs.converged = fs.certified_gap <= eps || optimal;
    return fs;
}

ConfigurationSampler::ConfigurationSampler(const FractionalSolution& fs) : fs_(&fs) {
    const double denom = std::max(static_cast<double>(fs.bins), fs.total_mass());
    double acc = 0.0;
    for (std::size_t k = 0; k < fs.pool.size(); ++k) {
        if (fs.mass[k] <= 0.0) continue;
        acc += fs.mass[k] / denom;
        support_.push_back(k);
        cumulative_.push_back(std::min(acc, 1.0));
    }
    cumulative_.push_back(1.0);
}

std::size_t ConfigurationSampler::draw_index(Rng& rng) const {
    const double u = rng.uniform01();
    const auto it = std::upper_bound(cumulative_.begin(), cumulative_.end(), u);
    const auto pos = static_cast<std::size_t>(it - cumulative_.begin());
    return pos < support_.size() ? support_[pos] : kEmpty;
}

const Configuration& ConfigurationSampler::draw(Rng& rng) const {
    const auto k = draw_index(rng);
    return k == kEmpty ? empty_ : fs_->pool[k];
}

Configuration sample_configuration(const FractionalSolution& fs, Rng& rng) {
    return ConfigurationSampler(fs).draw(rng);
}

SampledSet sample_T(const ConfigurationSampler& sampler, int ell, Rng& rng) {
    if (ell < 0) throw std::invalid_argument("sample_T: ell must be nonnegative");
    SampledSet out;
    out.configs.reserve(static_cast<std::size_t>(ell));
    std::vector<std::size_t> all;
    for (int t = 0; t < ell; ++t) {
        const auto& c = sampler.draw(rng);
        all.insert(all.end(), c.begin(), c.end());
        out.configs.push_back(c);
    }
    out.items = Configuration(std::move(all));
    return out;
}

SampledSet sample_T(const FractionalSolution& fs, int ell, Rng& rng) {
    if (ell > fs.bins) throw std::invalid_argument("sample_T: ell must not exceed m");
    return sample_T(ConfigurationSampler(fs), ell, rng);
}

std::string fractional_solution_json(const Instance& inst, const FractionalSolution& fs) {
    nlohmann::json cols = nlohmann::json::array();
    for (std::size_t k = 0; k < fs.pool.size(); ++k) {
        nlohmann::json ids = nlohmann::json::array();
        for (auto i : fs.pool[k]) ids.push_back(inst.item(i).id);
        cols.push_back({{"items", std::move(ids)}, {"mass", fs.mass[k]}});
    }
    nlohmann::json doc{{"m", fs.bins},
                       {"value", fs.value},
                       {"upper_bound", fs.upper_bound},
                       {"certified_gap", fs.certified_gap},
                       {"converged", fs.converged},
                       {"rounds", fs.rounds},
                       {"bin_price", fs.bin_price},
                       {"columns", std::move(cols)}};
    return doc.dump(2);
}

}  // namespace vmk
