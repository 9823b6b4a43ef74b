#include "vmk/mk.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <stdexcept>

namespace vmk {

namespace {

double density_1d(const MkItem& it) {
    return it.weight > 0.0 ? it.profit / it.weight : INFINITY;
}

// Density order; ties by higher profit, then smaller id.
bool denser(const MkItem& a, const MkItem& b) {
    const double da = density_1d(a), db = density_1d(b);
    if (da != db) return da > db;
    if (a.profit != b.profit) return a.profit > b.profit;
    return a.id < b.id;
}

void canonicalize(MkSolution& sol) {
    for (auto& bin : sol.bins) std::sort(bin.begin(), bin.end());
    std::stable_sort(sol.bins.begin(), sol.bins.end(), [](const auto& a, const auto& b) {
        if (a.empty() != b.empty()) return b.empty();
        return !a.empty() && a.front() < b.front();
    });
}

class MkSearch {
public:
    MkSearch(std::vector<MkItem> items, int bins, std::uint64_t node_cap)
        : items_(std::move(items)), node_cap_(node_cap), residual_(bins, 1.0), assign_(items_.size(), -1) {
        std::sort(items_.begin(), items_.end(), denser);
    }

    void run() {
        best_profit_ = -1.0;
        root_bound_ = bound(0);
        dfs(0, 0, 0.0);
    }

    bool exhausted() const { return exhausted_; }
    double root_bound() const { return root_bound_; }

    MkSolution best(int bins) const {
        MkSolution sol;
        sol.bins.resize(static_cast<std::size_t>(bins));
        for (std::size_t k = 0; k < items_.size(); ++k) {
            if (best_assign_.empty() || best_assign_[k] < 0) continue;
            sol.bins[static_cast<std::size_t>(best_assign_[k])].push_back(items_[k].id);
        }
        return sol;
    }

private:
    double bound(std::size_t depth) const {
        double cap = 0.0, largest = 0.0;
        for (double r : residual_) {
            cap += std::max(r, 0.0);
            largest = std::max(largest, r);
        }
        double total = 0.0;
        for (std::size_t k = depth; k < items_.size(); ++k) {
            const auto& it = items_[k];
            if (it.weight > largest + kFeasTol) continue;
            if (it.weight <= cap) {
                cap -= it.weight;
                total += it.profit;
            } else {
                total += it.profit * cap / it.weight;
                break;
            }
        }
        return total;
    }

    void dfs(std::size_t depth, int opened, double profit) {
        if (exhausted_) return;
        if (++nodes_ > node_cap_) {
            exhausted_ = true;
            return;
        }
        if (profit > best_profit_ + 1e-12) {
            best_profit_ = profit;
            best_assign_ = assign_;
        }
        if (depth == items_.size()) return;
        if (profit + bound(depth) <= best_profit_ + 1e-12) return;

        const auto& it = items_[depth];
        const int limit = std::min<int>(opened + 1, static_cast<int>(residual_.size()));
        for (int b = 0; b < limit; ++b) {
            if (it.weight > residual_[b] + kFeasTol) continue;
            // Bins with equal residual capacity are interchangeable.
            bool duplicate = false;
            for (int e = 0; e < b && !duplicate; ++e) duplicate = residual_[e] == residual_[b];
            if (duplicate) continue;
            residual_[b] -= it.weight;
            assign_[depth] = b;
            dfs(depth + 1, std::max(opened, b + 1), profit + it.profit);
            assign_[depth] = -1;
            residual_[b] += it.weight;
        }
        dfs(depth + 1, opened, profit);
    }

    std::vector<MkItem> items_;
    std::uint64_t node_cap_;
    std::uint64_t nodes_ = 0;
    bool exhausted_ = false;
    std::vector<double> residual_;
    std::vector<int> assign_;
    std::vector<int> best_assign_;
    double best_profit_ = -1.0;
    double root_bound_ = 0.0;
};

struct Packing {
    const MkInstance* mk;
    std::vector<int> where;  // bin per item position, -1 when unpacked
    std::vector<double> load;

    bool fits(std::size_t b, double w) const { return load[b] + w <= 1.0 + kFeasTol; }
    void put(std::size_t k, std::size_t b) {
        where[k] = static_cast<int>(b);
        load[b] += mk->items[k].weight;
    }
    void take(std::size_t k) {
        load[static_cast<std::size_t>(where[k])] -= mk->items[k].weight;
        where[k] = -1;
    }

    MkSolution to_solution() const {
        MkSolution sol;
        sol.bins.resize(load.size());
        for (std::size_t k = 0; k < where.size(); ++k) {
            if (where[k] >= 0) sol.bins[static_cast<std::size_t>(where[k])].push_back(mk->items[k].id);
        }
        for (auto& bin : sol.bins) std::sort(bin.begin(), bin.end());
        return sol;
    }
};

std::vector<std::size_t> density_order(const MkInstance& mk) {
    std::vector<std::size_t> order(mk.items.size());
    std::iota(order.begin(), order.end(), 0);
    std::sort(order.begin(), order.end(),
              [&](std::size_t a, std::size_t b) { return denser(mk.items[a], mk.items[b]); });
    return order;
}

Packing ffd_packing(const MkInstance& mk, const std::vector<std::size_t>& order) {
    Packing pk{&mk, std::vector<int>(mk.items.size(), -1),
               std::vector<double>(static_cast<std::size_t>(std::max(mk.bins, 0)), 0.0)};
    for (auto k : order) {
        const double w = mk.items[k].weight;
        for (std::size_t b = 0; b < pk.load.size(); ++b) {
            if (pk.fits(b, w)) {
                pk.put(k, b);
                break;
            }
        }
    }
    return pk;
}

// One improving move, or false when the packing is locally optimal.
bool improve(Packing& pk, const std::vector<std::size_t>& order) {
    const auto& items = pk.mk->items;
    const std::size_t nb = pk.load.size();
    for (auto u : order) {
        if (pk.where[u] >= 0 || items[u].profit <= 0.0) continue;
        const double wu = items[u].weight;
        for (std::size_t b = 0; b < nb; ++b) {
            if (pk.fits(b, wu)) {
                pk.put(u, b);
                return true;
            }
        }
        // Swap an unpacked item in for a less profitable packed one.
        for (std::size_t v = 0; v < items.size(); ++v) {
            if (pk.where[v] < 0 || items[v].profit >= items[u].profit) continue;
            const auto b = static_cast<std::size_t>(pk.where[v]);
            if (pk.load[b] - items[v].weight + wu <= 1.0 + kFeasTol) {
                pk.take(v);
                pk.put(u, b);
                return true;
            }
        }
        // Move a packed item to another bin to make room for u.
        for (std::size_t v = 0; v < items.size(); ++v) {
            if (pk.where[v] < 0) continue;
            const auto a = static_cast<std::size_t>(pk.where[v]);
            if (pk.load[a] - items[v].weight + wu > 1.0 + kFeasTol) continue;
            for (std::size_t b = 0; b < nb; ++b) {
                if (b == a || !pk.fits(b, items[v].weight)) continue;
                pk.take(v);
                pk.put(v, b);
                pk.put(u, a);
                return true;
            }
        }
    }
    return false;
}

}  // namespace

MkInstance associate(const Instance& inst, int k) {
    std::vector<std::size_t> all(inst.size());
    std::iota(all.begin(), all.end(), 0);
    return associate(inst, all, inst.bins(), k);
}

MkInstance associate(const Instance& inst, std::span<const std::size_t> subset, int bins, int k) {
    if (k < 1) throw std::invalid_argument("associate: k must be >= 1");
    if (bins < 0) throw std::invalid_argument("associate: bin count must be nonnegative");
    MkInstance mk;
    mk.bins = k * bins;
    mk.items.reserve(subset.size());
    for (auto i : subset) {
        const auto& it = inst.item(i);
        mk.items.push_back({i, it.max_weight(), it.profit});
    }
    return mk;
}

double mk_profit(const MkInstance& mk, const MkSolution& sol) {
    std::vector<std::size_t> ids;
    for (const auto& bin : sol.bins) ids.insert(ids.end(), bin.begin(), bin.end());
    std::sort(ids.begin(), ids.end());
    ids.erase(std::unique(ids.begin(), ids.end()), ids.end());
    double p = 0.0;
    for (const auto& it : mk.items) {
        if (std::binary_search(ids.begin(), ids.end(), it.id)) p += it.profit;
    }
    return p;
}

bool mk_feasible(const MkInstance& mk, const MkSolution& sol, double tol) {
    if (sol.bins.size() > static_cast<std::size_t>(std::max(mk.bins, 0))) return false;
    for (const auto& bin : sol.bins) {
        double load = 0.0;
        for (auto id : bin) {
            auto it = std::find_if(mk.items.begin(), mk.items.end(), [&](const MkItem& x) { return x.id == id; });
            if (it == mk.items.end()) return false;
            load += it->weight;
        }
        if (load > 1.0 + tol) return false;
    }
    return true;
}

Solution lift(const MkSolution& sol) {
    Solution out;
    for (const auto& bin : sol.bins) out.bins.emplace_back(bin);
    return out;
}

std::pair<Configuration, Configuration> split_configuration(const Instance& inst, const Configuration& c) {
    if (!is_feasible(inst, c)) throw InfeasibleInput("split_configuration: configuration is not 2-D feasible");
    std::vector<std::size_t> heavy1, heavy2;
    for (auto i : c) {
        const auto& it = inst.item(i);
        (it.w1 >= it.w2 ? heavy1 : heavy2).push_back(i);
    }
    return {Configuration(std::move(heavy1)), Configuration(std::move(heavy2))};
}

MkSolution solve_mk_exact(const MkInstance& mk, std::uint64_t node_cap) {
    const auto bins = static_cast<std::size_t>(std::max(mk.bins, 0));
    MkSolution sol;
    sol.bins.resize(bins);
    if (bins == 0) return sol;

    std::vector<MkItem> search_items;
    for (const auto& it : mk.items) {
        if (it.weight == 0.0) {
            sol.bins[0].push_back(it.id);
        } else if (it.profit > 0.0 && it.weight <= 1.0 + kFeasTol) {
            search_items.push_back(it);
        }
    }
    MkSearch search(std::move(search_items), mk.bins, node_cap);
    search.run();
    auto found = search.best(mk.bins);
    for (std::size_t b = 0; b < bins; ++b) {
        sol.bins[b].insert(sol.bins[b].end(), found.bins[b].begin(), found.bins[b].end());
    }
    canonicalize(sol);
    if (search.exhausted()) {
        double free_profit = 0.0;
        for (const auto& it : mk.items) {
            if (it.weight == 0.0) free_profit += it.profit;
        }
        throw MkBudgetExceeded(sol, std::max(mk_profit(mk, sol), free_profit + search.root_bound()));
    }
    return sol;
}

MkSolution mk_first_fit_decreasing(const MkInstance& mk) {
    return ffd_packing(mk, density_order(mk)).to_solution();
}

MkSolution solve_mk_heuristic(const MkInstance& mk) {
    const auto order = density_order(mk);
    auto pk = ffd_packing(mk, order);
    constexpr int kMaxMoves = 100'000;
    for (int moves = 0; moves < kMaxMoves && improve(pk, order); ++moves) {
    }
    return pk.to_solution();
}

double density_2d(const Item& item) {
    const double w = item.w1 + item.w2;
    return w > 0.0 ? item.profit / w : INFINITY;
}

std::vector<Configuration> first_fit_2d(const Instance& inst, FirstFitOrder order) {
    std::vector<std::size_t> all(inst.size());
    std::iota(all.begin(), all.end(), 0);
    return first_fit_2d(inst, all, order);
}

std::vector<Configuration> first_fit_2d(const Instance& inst, std::span<const std::size_t> items,
                                        FirstFitOrder order) {
    std::vector<std::size_t> seq(items.begin(), items.end());
    if (order == FirstFitOrder::ByDensityDesc) {
        std::stable_sort(seq.begin(), seq.end(), [&](std::size_t a, std::size_t b) {
            const auto &ia = inst.item(a), &ib = inst.item(b);
            const double da = density_2d(ia), db = density_2d(ib);
            if (da != db) return da > db;
            if (ia.profit != ib.profit) return ia.profit > ib.profit;
            return a < b;
        });
    }
    std::vector<std::vector<std::size_t>> bins;
    std::vector<Load> loads;
    for (auto i : seq) {
        const auto& it = inst.item(i);
        std::size_t b = 0;
        for (; b < bins.size(); ++b) {
            if (loads[b].w1 + it.w1 <= 1.0 + kFeasTol && loads[b].w2 + it.w2 <= 1.0 + kFeasTol) break;
        }
        if (b == bins.size()) {
            bins.emplace_back();
            loads.emplace_back();
        }
        bins[b].push_back(i);
        loads[b].w1 += it.w1;
        loads[b].w2 += it.w2;
    }
    std::vector<Configuration> out;
    out.reserve(bins.size());
    for (auto& b : bins) out.emplace_back(std::move(b));
    return out;
}

}  // namespace vmk
