#include "vmk/solvers.hpp"

#include <algorithm>
#include <chrono>
#include <cmath>
#include <numeric>
#include <stdexcept>

#include "vmk/pricing.hpp"

namespace vmk {

namespace {

using Clock = std::chrono::steady_clock;

double elapsed_ms(Clock::time_point start) {
    return std::chrono::duration<double, std::milli>(Clock::now() - start).count();
}

// Pads or trims to exactly m bins and fills in the profit fields.
void finish(const Instance& inst, SolveResult& res, Clock::time_point start) {
    res.solution = dedup_solution(res.solution);
    res.solution.bins.resize(static_cast<std::size_t>(inst.bins()));
    res.report.profit = solution_profit(inst, res.solution);
    res.report.bins_used = static_cast<int>(bins_used(res.solution));
    res.report.wall_ms = elapsed_ms(start);
}

void attach_lp(SolveReport& report, const FractionalSolution& lp) {
    report.lp_value = lp.value;
    report.lp_bound = lp.upper_bound;
    report.lp_converged = lp.converged;
}

// Shared by the hybrid and the baseline so equal seeds give identical draws.
SolveResult sample_then_fill(const Instance& inst, const FractionalSolution& lp, int ell, MkMode mode,
                             std::uint64_t seed, Algorithm algo, Clock::time_point start) {
    const int m = inst.bins();
    if (ell < 0 || ell > m) throw std::invalid_argument("ell must lie in [0, m]");
    SolveResult res;
    res.report.algorithm = algo;
    res.report.seed = seed;
    res.report.ell = ell;
    attach_lp(res.report, lp);

    Rng rng(seed);
    ConfigurationSampler sampler(lp);
    auto sampled = sample_T(sampler, ell, rng);
    res.report.sampled_profit = profit_of(inst, sampled.items);
    res.solution.bins = std::move(sampled.configs);

    if (ell < m) {
        std::vector<std::size_t> rest;
        rest.reserve(inst.size());
        for (std::size_t i = 0; i < inst.size(); ++i) {
            if (!sampled.items.contains(i)) rest.push_back(i);
        }
        auto mk = associate(inst, rest, m - ell, 1);
        auto filled = lift(solve_mk(mk, mode));
        for (auto& bin : filled.bins) res.solution.bins.push_back(std::move(bin));
    }
    finish(inst, res, start);
    return res;
}

struct Cand {
    std::size_t index;
    double w1;
    double w2;
    double profit;
};

std::vector<std::size_t> order_by(const std::vector<Cand>& cands, int dim) {
    std::vector<std::size_t> order(cands.size());
    std::iota(order.begin(), order.end(), 0);
    std::sort(order.begin(), order.end(), [&](std::size_t a, std::size_t b) {
        const double wa = dim == 1 ? cands[a].w1 : cands[a].w2;
        const double wb = dim == 1 ? cands[b].w1 : cands[b].w2;
        const double lhs = cands[a].profit * wb, rhs = cands[b].profit * wa;
        if (lhs != rhs) return lhs > rhs;
        return a < b;
    });
    return order;
}

class ExactSearch {
public:
    ExactSearch(std::vector<Cand> cands, int bins, double global_ub, std::uint64_t node_cap)
        : cands_(std::move(cands)),
          r1_(static_cast<std::size_t>(bins), 1.0),
          r2_(static_cast<std::size_t>(bins), 1.0),
          assign_(cands_.size(), -1),
          global_ub_(global_ub),
          node_cap_(node_cap) {
        order1_ = order_by(cands_, 1);
        order2_ = order_by(cands_, 2);
    }

    void run() { dfs(0, 0, 0.0); }

    bool exhausted() const { return exhausted_; }
    double best_profit() const { return best_profit_; }
    const std::vector<int>& best_assign() const { return best_assign_; }
    const std::vector<Cand>& cands() const { return cands_; }

private:
    bool fits_somewhere(const Cand& c) const {
        for (std::size_t b = 0; b < r1_.size(); ++b) {
            if (c.w1 <= r1_[b] + kFeasTol && c.w2 <= r2_[b] + kFeasTol) return true;
        }
        return false;
    }

    double fractional(const std::vector<std::size_t>* order, std::size_t depth, double cap, int dim,
                      const std::vector<char>& usable) const {
        double total = 0.0;
        for (std::size_t k = 0; k < cands_.size(); ++k) {
            const std::size_t pos = order ? (*order)[k] : k;
            if (pos < depth || !usable[pos]) continue;
            const auto& c = cands_[pos];
            const double w = dim == 1 ? c.w1 : dim == 2 ? c.w2 : c.w1 + c.w2;
            if (w <= cap) {
                cap -= w;
                total += c.profit;
            } else {
                total += c.profit * cap / w;
                break;
            }
        }
        return total;
    }

    double bound(std::size_t depth) {
        usable_.assign(cands_.size(), 0);
        for (std::size_t k = depth; k < cands_.size(); ++k) usable_[k] = fits_somewhere(cands_[k]) ? 1 : 0;
        double c1 = 0.0, c2 = 0.0;
        for (std::size_t b = 0; b < r1_.size(); ++b) {
            c1 += std::max(r1_[b], 0.0) + kFeasTol;
            c2 += std::max(r2_[b], 0.0) + kFeasTol;
        }
        double ub = fractional(nullptr, depth, c1 + c2, 0, usable_);
        ub = std::min(ub, fractional(&order1_, depth, c1, 1, usable_));
        ub = std::min(ub, fractional(&order2_, depth, c2, 2, usable_));
        return ub;
    }

    void dfs(std::size_t depth, int opened, double profit) {
        if (exhausted_ || done_) return;
        if (++nodes_ > node_cap_) {
            exhausted_ = true;
            return;
        }
        if (profit > best_profit_ + 1e-12) {
            best_profit_ = profit;
            best_assign_ = assign_;
            if (best_profit_ >= global_ub_ - 1e-9) {
                done_ = true;
                return;
            }
        }
        if (depth == cands_.size()) return;
        if (profit + bound(depth) <= best_profit_ + 1e-12) return;

        const auto& c = cands_[depth];
        const int limit = std::min<int>(opened + 1, static_cast<int>(r1_.size()));
        for (int b = 0; b < limit; ++b) {
            if (c.w1 > r1_[b] + kFeasTol || c.w2 > r2_[b] + kFeasTol) continue;
            bool duplicate = false;
            for (int e = 0; e < b && !duplicate; ++e) duplicate = r1_[e] == r1_[b] && r2_[e] == r2_[b];
            if (duplicate) continue;
            r1_[b] -= c.w1;
            r2_[b] -= c.w2;
            assign_[depth] = b;
            dfs(depth + 1, std::max(opened, b + 1), profit + c.profit);
            assign_[depth] = -1;
            r1_[b] += c.w1;
            r2_[b] += c.w2;
        }
        dfs(depth + 1, opened, profit);
    }

    std::vector<Cand> cands_;
    std::vector<std::size_t> order1_;
    std::vector<std::size_t> order2_;
    std::vector<double> r1_;
    std::vector<double> r2_;
    std::vector<int> assign_;
    std::vector<int> best_assign_;
    std::vector<char> usable_;
    double best_profit_ = -1.0;
    double global_ub_;
    std::uint64_t node_cap_;
    std::uint64_t nodes_ = 0;
    bool exhausted_ = false;
    bool done_ = false;
};

class MckSearch {
public:
    MckSearch(const McKInstance& mck, std::vector<std::size_t> order, std::uint64_t node_cap)
        : mck_(mck), order_(std::move(order)), load_(static_cast<std::size_t>(mck.dimensions), 0.0),
          node_cap_(node_cap) {
        suffix_.assign(order_.size() + 1, 0.0);
        for (std::size_t k = order_.size(); k-- > 0;) {
            double best = 0.0;
            for (const auto& copy : mck_.classes[order_[k]]) best = std::max(best, copy.profit);
            suffix_[k] = suffix_[k + 1] + best;
        }
    }

    void run() { dfs(0, 0.0); }
    bool exhausted() const { return exhausted_; }
    double best_profit() const { return best_profit_; }
    const std::vector<std::pair<std::size_t, std::size_t>>& best() const { return best_; }

private:
    void dfs(std::size_t depth, double profit) {
        if (exhausted_) return;
        if (++nodes_ > node_cap_) {
            exhausted_ = true;
            return;
        }
        if (profit > best_profit_ + 1e-12) {
            best_profit_ = profit;
            best_ = current_;
        }
        if (depth == order_.size()) return;
        if (profit + suffix_[depth] <= best_profit_ + 1e-12) return;
        const auto cls = order_[depth];
        const auto& copies = mck_.classes[cls];
        for (std::size_t c = 0; c < copies.size(); ++c) {
            const auto& copy = copies[c];
            if (copy.profit <= 0.0) continue;
            bool ok = true;
            for (std::size_t d = 0; d < load_.size() && ok; ++d) {
                ok = load_[d] + copy.weight[d] <= 1.0 + kFeasTol;
            }
            if (!ok) continue;
            for (std::size_t d = 0; d < load_.size(); ++d) load_[d] += copy.weight[d];
            current_.emplace_back(cls, c);
            dfs(depth + 1, profit + copy.profit);
            current_.pop_back();
            for (std::size_t d = 0; d < load_.size(); ++d) load_[d] -= copy.weight[d];
        }
        dfs(depth + 1, profit);
    }

    const McKInstance& mck_;
    std::vector<std::size_t> order_;
    std::vector<double> load_;
    std::vector<double> suffix_;
    std::vector<std::pair<std::size_t, std::size_t>> current_;
    std::vector<std::pair<std::size_t, std::size_t>> best_;
    double best_profit_ = -1.0;
    std::uint64_t node_cap_;
    std::uint64_t nodes_ = 0;
    bool exhausted_ = false;
};

}  // namespace

std::string_view algorithm_name(Algorithm a) {
    switch (a) {
        case Algorithm::Hybrid: return "hybrid";
        case Algorithm::Baseline: return "baseline";
        case Algorithm::Reduction: return "reduction";
        case Algorithm::Exact: return "exact";
        case Algorithm::Mck: return "mck";
        case Algorithm::EpsNice: return "epsnice";
    }
    return "unknown";
}

std::optional<Algorithm> parse_algorithm(std::string_view name) {
    for (auto a : {Algorithm::Hybrid, Algorithm::Baseline, Algorithm::Reduction, Algorithm::Exact,
                   Algorithm::Mck, Algorithm::EpsNice}) {
        if (algorithm_name(a) == name) return a;
    }
    return std::nullopt;
}

std::string_view mk_mode_name(MkMode mode) {
    switch (mode) {
        case MkMode::Exact: return "exact";
        case MkMode::Heuristic: return "heuristic";
        case MkMode::Auto: return "auto";
    }
    return "unknown";
}

std::optional<MkMode> parse_mk_mode(std::string_view name) {
    for (auto m : {MkMode::Exact, MkMode::Heuristic, MkMode::Auto}) {
        if (mk_mode_name(m) == name) return m;
    }
    return std::nullopt;
}

int default_ell(int m) { return static_cast<int>(std::ceil(m * std::log(2.0))); }

MkSolution solve_mk(const MkInstance& mk, MkMode mode) {
    if (mode == MkMode::Auto) {
        mode = (mk.items.size() <= 18 || mk.bins <= 2) ? MkMode::Exact : MkMode::Heuristic;
    }
    if (mode == MkMode::Heuristic) return solve_mk_heuristic(mk);
    try {
        return solve_mk_exact(mk);
    } catch (const MkBudgetExceeded& e) {
        auto heur = solve_mk_heuristic(mk);
        return mk_profit(mk, heur) > mk_profit(mk, e.best()) ? heur : e.best();
    }
}

SolveResult solve_hybrid(const Instance& inst, const HybridParams& params) {
    const auto start = Clock::now();
    auto lp = solve_clp(inst, params.eps, params.clp_budget);
    auto res = solve_hybrid(inst, params, lp);
    res.report.wall_ms = elapsed_ms(start);
    return res;
}

SolveResult solve_hybrid(const Instance& inst, const HybridParams& params, const FractionalSolution& lp) {
    if (!(params.eps > 0.0 && params.eps < 0.5)) throw std::invalid_argument("hybrid: eps must be in (0, 0.5)");
    const auto start = Clock::now();
    const int ell = params.ell_override.value_or(default_ell(inst.bins()));
    if (ell > inst.bins()) throw std::invalid_argument("hybrid: ell override exceeds m");
    return sample_then_fill(inst, lp, ell, params.mk_mode, params.seed, Algorithm::Hybrid, start);
}

SolveResult solve_sampling_baseline(const Instance& inst, double eps, std::uint64_t seed,
                                    const IterationBudget& budget) {
    const auto start = Clock::now();
    auto lp = solve_clp(inst, eps, budget);
    auto res = solve_sampling_baseline(inst, lp, seed);
    res.report.wall_ms = elapsed_ms(start);
    return res;
}

SolveResult solve_sampling_baseline(const Instance& inst, const FractionalSolution& lp, std::uint64_t seed) {
    return sample_then_fill(inst, lp, inst.bins(), MkMode::Exact, seed, Algorithm::Baseline, Clock::now());
}

SolveResult solve_reduction(const Instance& inst, double /*eps*/, MkMode mode) {
    const auto start = Clock::now();
    SolveResult res;
    res.report.algorithm = Algorithm::Reduction;
    res.solution = lift(solve_mk(associate(inst, 1), mode));
    finish(inst, res, start);
    return res;
}

double default_prefix_budget(const Instance& inst, double eps) {
    double total = 0.0;
    for (const auto& it : inst.items()) total += it.weight_sum();
    return std::min(std::pow(eps, -40.0), 0.1 * total);
}

SolveResult eps_nice_wrap(const Instance& inst, double eps, double prefix_budget, const InnerSolver& inner) {
    (void)eps;
    const auto start = Clock::now();
    std::vector<std::size_t> order(inst.size());
    std::iota(order.begin(), order.end(), 0);
    std::stable_sort(order.begin(), order.end(), [&](std::size_t a, std::size_t b) {
        const auto &ia = inst.item(a), &ib = inst.item(b);
        const double da = density_2d(ia), db = density_2d(ib);
        if (da != db) return da > db;
        if (ia.profit != ib.profit) return ia.profit > ib.profit;
        return a < b;
    });

    std::vector<std::size_t> prefix;
    double prefix_weight = 0.0;
    std::size_t k = 0;
    for (; k < order.size() && prefix_weight < prefix_budget; ++k) {
        prefix.push_back(order[k]);
        prefix_weight += inst.item(order[k]).weight_sum();
    }
    std::vector<std::size_t> rest(order.begin() + static_cast<std::ptrdiff_t>(k), order.end());
    std::sort(rest.begin(), rest.end());

    auto candidates = first_fit_2d(inst, prefix, FirstFitOrder::Given);
    if (!rest.empty()) {
        const auto sub = inst.restricted(rest, inst.bins());
        // `rest` is sorted and ids sort the same way, so sub index j maps to rest[j].
        const auto inner_sol = inner(sub);
        for (const auto& bin : inner_sol.bins) {
            std::vector<std::size_t> mapped;
            for (auto j : bin) mapped.push_back(rest.at(j));
            candidates.emplace_back(std::move(mapped));
        }
    }
    std::stable_sort(candidates.begin(), candidates.end(), [&](const auto& a, const auto& b) {
        return profit_of(inst, a) > profit_of(inst, b);
    });
    if (candidates.size() > static_cast<std::size_t>(inst.bins())) {
        candidates.resize(static_cast<std::size_t>(inst.bins()));
    }

    SolveResult res;
    res.report.algorithm = Algorithm::EpsNice;
    res.solution.bins = std::move(candidates);
    finish(inst, res, start);
    return res;
}

NicenessReport is_eps_nice(const Instance& inst, double eps, double opt_estimate) {
    if (!(opt_estimate > 0.0)) throw std::invalid_argument("is_eps_nice: optEstimate must be positive");
    NicenessReport rep;
    std::vector<double> values(inst.size());
    for (std::size_t i = 0; i < inst.size(); ++i) values[i] = inst.item(i).profit;
    try {
        rep.max_config_profit_bound = price_exact(inst, values).value;
    } catch (const PricingBudgetExceeded& e) {
        rep.max_config_profit_bound = e.upper_bound();
    }
    rep.m_threshold_logloglog = std::pow(eps, -30.0);
    const double lm = std::log(static_cast<double>(inst.bins()));
    const double llm = lm > 0.0 ? std::log(lm) : -INFINITY;
    rep.m_logloglog = llm > 0.0 ? std::log(llm) : -INFINITY;
    rep.bins_condition = rep.m_logloglog >= rep.m_threshold_logloglog;
    rep.profit_condition = rep.max_config_profit_bound <= std::pow(eps, 20.0) * opt_estimate;
    rep.nice = rep.bins_condition && rep.profit_condition;
    return rep;
}

McKInstance reduce_to_mck(const Instance& inst) {
    const int m = inst.bins();
    McKInstance mck;
    mck.dimensions = 2 * m;
    mck.classes.resize(inst.size());
    for (std::size_t i = 0; i < inst.size(); ++i) {
        const auto& it = inst.item(i);
        for (int r = 0; r < m; ++r) {
            MckCopy copy;
            copy.item = i;
            copy.bin = r;
            copy.weight.assign(static_cast<std::size_t>(mck.dimensions), 0.0);
            copy.weight[static_cast<std::size_t>(2 * r)] = it.w1;
            copy.weight[static_cast<std::size_t>(2 * r + 1)] = it.w2;
            copy.profit = it.profit;
            mck.classes[i].push_back(std::move(copy));
        }
    }
    return mck;
}

MckSolution solve_mck_exact(const McKInstance& mck, std::uint64_t node_cap) {
    // Classes with the highest best-copy profit first.
    std::vector<std::size_t> order(mck.classes.size());
    std::iota(order.begin(), order.end(), 0);
    auto best_profit = [&](std::size_t t) {
        double b = 0.0;
        for (const auto& c : mck.classes[t]) b = std::max(b, c.profit);
        return b;
    };
    std::stable_sort(order.begin(), order.end(),
                     [&](std::size_t a, std::size_t b) { return best_profit(a) > best_profit(b); });
    MckSearch search(mck, std::move(order), node_cap);
    search.run();
    MckSolution sol;
    sol.chosen = search.best();
    std::sort(sol.chosen.begin(), sol.chosen.end());
    sol.profit = std::max(search.best_profit(), 0.0);
    sol.complete = !search.exhausted();
    return sol;
}

Solution mck_to_solution(const Instance& inst, const McKInstance& mck, const MckSolution& sol) {
    std::vector<std::vector<std::size_t>> bins(static_cast<std::size_t>(inst.bins()));
    for (auto [cls, c] : sol.chosen) {
        const auto& copy = mck.classes.at(cls).at(c);
        bins.at(static_cast<std::size_t>(copy.bin)).push_back(copy.item);
    }
    Solution out;
    for (auto& b : bins) out.bins.emplace_back(std::move(b));
    return out;
}

ExactResult solve_exact(const Instance& inst, std::uint64_t node_cap) {
    ExactResult res;
    const auto m = static_cast<std::size_t>(inst.bins());
    std::vector<std::vector<std::size_t>> bins(m);
    std::vector<Cand> cands;
    for (std::size_t i = 0; i < inst.size(); ++i) {
        const auto& it = inst.item(i);
        if (it.w1 == 0.0 && it.w2 == 0.0) {
            bins[0].push_back(i);
        } else if (it.profit > 0.0) {
            cands.push_back({i, it.w1, it.w2, it.profit});
        }
    }
    std::stable_sort(cands.begin(), cands.end(), [](const Cand& a, const Cand& b) {
        const double da = a.profit / (a.w1 + a.w2), db = b.profit / (b.w1 + b.w2);
        if (da != db) return da > db;
        if (a.profit != b.profit) return a.profit > b.profit;
        return a.index < b.index;
    });

    // The C-LP bound lets the search stop as soon as the incumbent meets it.
    double global_ub = INFINITY;
    if (!inst.empty()) {
        auto lp = solve_clp(inst, 1e-9);
        double free_profit = 0.0;
        for (auto i : bins[0]) free_profit += inst.item(i).profit;
        global_ub = lp.upper_bound - free_profit;
    }
    ExactSearch search(cands, inst.bins(), global_ub, node_cap);
    search.run();
    const auto& assign = search.best_assign();
    for (std::size_t k = 0; k < assign.size(); ++k) {
        if (assign[k] >= 0) bins[static_cast<std::size_t>(assign[k])].push_back(search.cands()[k].index);
    }
    for (auto& b : bins) res.solution.bins.emplace_back(std::move(b));
    res.profit = solution_profit(inst, res.solution);
    res.complete = !search.exhausted();
    return res;
}

}  // namespace vmk
