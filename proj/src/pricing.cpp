#include "vmk/pricing.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <stdexcept>

namespace vmk {

namespace {

struct Candidate {
    std::size_t index;
    double w1;
    double w2;
    double value;
};

double agg_density(const Candidate& c) { return c.value / (c.w1 + c.w2); }

// Depth-first 0/1 search over candidates in density order. `integral` values
// allow the tighter floor() pruning used by the scaled variant; otherwise
// nodes whose bound ties the incumbent stay open so the lexicographic tie rule
// sees every optimum.
class KnapsackSearch {
public:
    KnapsackSearch(std::vector<Candidate> cands, double cap1, double cap2, bool integral,
                   std::uint64_t node_cap)
        : cands_(std::move(cands)), cap1_(cap1), cap2_(cap2), integral_(integral), node_cap_(node_cap) {
        std::stable_sort(cands_.begin(), cands_.end(), [](const Candidate& a, const Candidate& b) {
            const double da = agg_density(a), db = agg_density(b);
            if (da != db) return da > db;
            if (a.value != b.value) return a.value > b.value;
            return a.index < b.index;
        });
        const auto n = cands_.size();
        order1_.resize(n);
        order2_.resize(n);
        std::iota(order1_.begin(), order1_.end(), 0);
        std::iota(order2_.begin(), order2_.end(), 0);
        auto by_dim = [this](auto weight) {
            return [this, weight](std::size_t a, std::size_t b) {
                const auto &ca = cands_[a], &cb = cands_[b];
                const double wa = weight(ca), wb = weight(cb);
                // a/wa > b/wb without dividing by zero
                const double lhs = ca.value * wb, rhs = cb.value * wa;
                if (lhs != rhs) return lhs > rhs;
                return a < b;
            };
        };
        std::sort(order1_.begin(), order1_.end(), by_dim([](const Candidate& c) { return c.w1; }));
        std::sort(order2_.begin(), order2_.end(), by_dim([](const Candidate& c) { return c.w2; }));
    }

    void run() {
        current_.clear();
        best_value_ = 0.0;
        best_.clear();
        root_bound_ = bound(0, cap1_, cap2_);
        dfs(0, cap1_, cap2_, 0.0);
    }

    double root_bound() const { return root_bound_; }
    bool exhausted() const { return exhausted_; }
    const std::vector<std::size_t>& best_indices() const { return best_; }

private:
    double tie_tol(double v) const { return 1e-12 * std::max(1.0, std::abs(v)); }

    bool fits(const Candidate& c, double r1, double r2) const {
        return c.w1 <= r1 + kFeasTol && c.w2 <= r2 + kFeasTol;
    }

    double fractional(const std::vector<std::size_t>* order, std::size_t depth, double cap,
                      double r1, double r2, int dim) const {
        double total = 0.0;
        cap = std::max(cap, 0.0);
        const auto n = cands_.size();
        for (std::size_t k = 0; k < n; ++k) {
            const std::size_t pos = order ? (*order)[k] : k;
            if (pos < depth) continue;
            const auto& c = cands_[pos];
            if (!fits(c, r1, r2)) continue;
            const double w = dim == 1 ? c.w1 : dim == 2 ? c.w2 : c.w1 + c.w2;
            if (w <= cap) {
                cap -= w;
                total += c.value;
            } else {
                total += c.value * cap / w;
                break;
            }
        }
        return total;
    }

    double bound(std::size_t depth, double r1, double r2) const {
        double b = fractional(nullptr, depth, r1 + r2 + 2 * kFeasTol, r1, r2, 0);
        b = std::min(b, fractional(&order1_, depth, r1 + kFeasTol, r1, r2, 1));
        b = std::min(b, fractional(&order2_, depth, r2 + kFeasTol, r1, r2, 2));
        return b;
    }

    void consider(double value) {
        if (value > best_value_ + tie_tol(best_value_)) {
            best_value_ = value;
            best_ = sorted_current();
        } else if (!integral_ && value >= best_value_ - tie_tol(best_value_)) {
            auto cand = sorted_current();
            if (cand < best_) {
                best_ = std::move(cand);
                best_value_ = std::max(best_value_, value);
            }
        }
    }

    std::vector<std::size_t> sorted_current() const {
        std::vector<std::size_t> out;
        out.reserve(current_.size());
        for (auto pos : current_) out.push_back(cands_[pos].index);
        std::sort(out.begin(), out.end());
        return out;
    }

    bool prune(double value, double b) const {
        if (integral_) return std::floor(value + b + 1e-9) <= best_value_ + 0.5;
        return value + b < best_value_ - tie_tol(best_value_);
    }

    void dfs(std::size_t depth, double r1, double r2, double value) {
        if (exhausted_) return;
        if (++nodes_ > node_cap_) {
            exhausted_ = true;
            return;
        }
        consider(value);
        if (depth == cands_.size()) return;
        if (prune(value, bound(depth, r1, r2))) return;
        const auto& c = cands_[depth];
        if (fits(c, r1, r2)) {
            current_.push_back(depth);
            dfs(depth + 1, r1 - c.w1, r2 - c.w2, value + c.value);
            current_.pop_back();
        }
        dfs(depth + 1, r1, r2, value);
    }

    std::vector<Candidate> cands_;
    std::vector<std::size_t> order1_;
    std::vector<std::size_t> order2_;
    double cap1_;
    double cap2_;
    bool integral_;
    std::uint64_t node_cap_;
    std::uint64_t nodes_ = 0;
    bool exhausted_ = false;
    double root_bound_ = 0.0;
    double best_value_ = 0.0;
    std::vector<std::size_t> current_;
    std::vector<std::size_t> best_;
};

struct Prepared {
    std::vector<std::size_t> free_items;  // zero weight, positive value
    std::vector<Candidate> cands;
};

Prepared prepare(const Instance& inst, std::span<const double> values) {
    if (values.size() != inst.size()) {
        throw std::invalid_argument("pricing: value assignment must cover every item");
    }
    Prepared p;
    for (std::size_t i = 0; i < inst.size(); ++i) {
        const double v = values[i];
        if (!(v > 0.0)) continue;
        const auto& item = inst.item(i);
        if (item.w1 == 0.0 && item.w2 == 0.0) {
            p.free_items.push_back(i);
        } else {
            p.cands.push_back({i, item.w1, item.w2, v});
        }
    }
    return p;
}

double clamped_sum(std::span<const double> values, const Configuration& c) {
    double s = 0.0;
    for (auto i : c) s += std::max(values[i], 0.0);
    return s;
}

PricedColumn assemble(std::span<const double> values, const std::vector<std::size_t>& free_items,
                      const std::vector<std::size_t>& chosen) {
    std::vector<std::size_t> all = free_items;
    all.insert(all.end(), chosen.begin(), chosen.end());
    PricedColumn col;
    col.config = Configuration(std::move(all));
    col.value = clamped_sum(values, col.config);
    return col;
}

PricedColumn greedy(std::span<const double> values, const Prepared& p) {
    auto cands = p.cands;
    std::sort(cands.begin(), cands.end(), [](const Candidate& a, const Candidate& b) {
        const double da = agg_density(a), db = agg_density(b);
        if (da != db) return da > db;
        return a.index < b.index;
    });
    double r1 = 1.0, r2 = 1.0;
    std::vector<std::size_t> chosen;
    for (const auto& c : cands) {
        if (c.w1 <= r1 + kFeasTol && c.w2 <= r2 + kFeasTol) {
            chosen.push_back(c.index);
            r1 -= c.w1;
            r2 -= c.w2;
        }
    }
    auto col = assemble(values, p.free_items, chosen);
    // The best single item is also a candidate.
    for (const auto& c : cands) {
        auto single = assemble(values, p.free_items, {c.index});
        if (single.value > col.value) col = std::move(single);
    }
    return col;
}

}  // namespace

PricedColumn price_exact(const Instance& inst, std::span<const double> values, std::uint64_t node_cap) {
    auto p = prepare(inst, values);
    KnapsackSearch search(p.cands, 1.0, 1.0, false, node_cap);
    search.run();
    auto col = assemble(values, p.free_items, search.best_indices());
    if (search.exhausted()) {
        double free_value = 0.0;
        for (auto i : p.free_items) free_value += values[i];
        throw PricingBudgetExceeded(col, std::max(col.value, free_value + search.root_bound()));
    }
    return col;
}

PricedColumn price_approx(const Instance& inst, std::span<const double> values, double eps,
                          std::uint64_t node_cap) {
    if (!(eps > 0.0 && eps < 1.0)) throw std::invalid_argument("price_approx: eps must be in (0,1)");
    auto p = prepare(inst, values);
    double vmax = 0.0;
    for (const auto& c : p.cands) vmax = std::max(vmax, c.value);
    if (p.cands.empty() || vmax <= 0.0) {
        return assemble(values, p.free_items, {});
    }
    const double step = eps * vmax / static_cast<double>(p.cands.size());
    std::vector<Candidate> scaled;
    scaled.reserve(p.cands.size());
    for (const auto& c : p.cands) {
        const double s = std::floor(c.value / step);
        if (s > 0.0) scaled.push_back({c.index, c.w1, c.w2, s});
    }
    auto fallback = greedy(values, p);
    if (scaled.empty()) {
        fallback.optimality_gap = eps * vmax;
        return fallback;
    }
    KnapsackSearch search(std::move(scaled), 1.0, 1.0, true, node_cap);
    search.run();
    auto col = assemble(values, p.free_items, search.best_indices());
    if (search.exhausted() && fallback.value > col.value) col = std::move(fallback);
    // Each kept item loses less than one step to rounding.
    col.optimality_gap = search.exhausted()
                             ? std::max(0.0, pricing_upper_bound(inst, values) - col.value)
                             : eps * vmax;
    return col;
}

double pricing_upper_bound(const Instance& inst, std::span<const double> values) {
    auto p = prepare(inst, values);
    double free_value = 0.0;
    for (auto i : p.free_items) free_value += values[i];
    KnapsackSearch search(p.cands, 1.0, 1.0, false, 0);
    search.run();
    return free_value + search.root_bound();
}

}  // namespace vmk
