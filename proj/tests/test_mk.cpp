#include <doctest.h>

#include <algorithm>
#include <numeric>
#include <vector>

#include "oracles.hpp"
#include "vmk/generator.hpp"
#include "vmk/mk.hpp"
#include "vmk/rng.hpp"

using namespace vmk;

namespace {

MkInstance random_mk(Rng& rng, int n, int bins) {
    MkInstance mk;
    mk.bins = bins;
    for (int i = 0; i < n; ++i) {
        mk.items.push_back({static_cast<std::size_t>(i), rng.uniform(0.05, 0.9), rng.uniform(0.1, 1.0)});
    }
    return mk;
}

// A random feasible configuration built greedily over a shuffled item order.
Configuration random_config(const Instance& inst, Rng& rng) {
    std::vector<std::size_t> order(inst.size());
    std::iota(order.begin(), order.end(), 0);
    for (std::size_t k = order.size(); k > 1; --k) std::swap(order[k - 1], order[rng.below(k)]);
    std::vector<std::size_t> picked;
    double w1 = 0, w2 = 0;
    for (auto i : order) {
        const auto& it = inst.item(i);
        if (w1 + it.w1 <= 1 && w2 + it.w2 <= 1) {
            picked.push_back(i);
            w1 += it.w1;
            w2 += it.w2;
        }
    }
    return Configuration(picked);
}

double max_weight_sum(const Instance& inst, const Configuration& c) {
    double s = 0;
    for (auto i : c) s += inst.item(i).max_weight();
    return s;
}

}  // namespace

TEST_CASE("associate: weights are coordinate maxima, bins scale with k") {
    Instance inst({{"a", 0.3, 0.7, 2}}, 4);
    auto mk = associate(inst, 1);
    REQUIRE(mk.items.size() == 1);
    CHECK(mk.items[0].weight == 0.7);
    CHECK(mk.items[0].profit == 2);
    CHECK(mk.bins == 4);
    Instance three({{"a", 0.3, 0.3, 1}, {"b", 0.25, 0.25, 1}}, 3);
    CHECK(associate(three, 2).bins == 6);
    for (const auto& it : associate(three, 1).items) CHECK(it.weight == three.item(it.id).w1);
    CHECK_THROWS_AS(associate(three, 0), std::invalid_argument);
}

TEST_CASE("split: examples") {
    Instance inst({{"p", 0.6, 0.2, 1}, {"q", 0.2, 0.6, 1}, {"r", 0.9, 0.9, 1}}, 1);
    auto [b0, c0] = split_configuration(inst, Configuration{});
    CHECK(b0.empty());
    CHECK(c0.empty());
    auto [b, c] = split_configuration(inst, Configuration{0, 1});
    CHECK(b == Configuration{0});
    CHECK(c == Configuration{1});
    CHECK(max_weight_sum(inst, b) == doctest::Approx(0.6));
    CHECK_THROWS_AS(split_configuration(inst, Configuration{0, 2}), InfeasibleInput);
}

TEST_CASE("split: both halves are 1-D feasible on random configurations") {
    Rng rng(11);
    for (int t = 0; t < 1000; ++t) {
        auto inst = generate({static_cast<Family>(t % 4), 15, 1, static_cast<std::uint64_t>(t), {}});
        auto c = random_config(inst, rng);
        auto [b, c2] = split_configuration(inst, c);
        CHECK(max_weight_sum(inst, b) <= 1 + kFeasTol);
        CHECK(max_weight_sum(inst, c2) <= 1 + kFeasTol);
        std::vector<std::size_t> uni(b.begin(), b.end());
        uni.insert(uni.end(), c2.begin(), c2.end());
        std::sort(uni.begin(), uni.end());
        CHECK(uni == c.items());
    }
}

TEST_CASE("split: a packing into q bins gives at most 2q associated bins") {
    Rng rng(12);
    for (int t = 0; t < 100; ++t) {
        auto inst = generate({Family::Uniform, 30, 1, static_cast<std::uint64_t>(t) + 50, {}});
        auto bins = first_fit_2d(inst, FirstFitOrder::Given);
        std::vector<Configuration> halves;
        for (const auto& c : bins) {
            auto [b, c2] = split_configuration(inst, c);
            if (!b.empty()) halves.push_back(b);
            if (!c2.empty()) halves.push_back(c2);
        }
        CHECK(halves.size() <= 2 * bins.size());
        for (const auto& h : halves) CHECK(max_weight_sum(inst, h) <= 1 + kFeasTol);
    }
}

TEST_CASE("mk exact: zero bins and pairwise conflicting items") {
    MkInstance none{{{0, 0.3, 1}}, 0};
    auto s0 = solve_mk_exact(none);
    CHECK(s0.bins.empty());
    CHECK(mk_profit(none, s0) == 0);

    MkInstance mk{{{0, 0.6, 5}, {1, 0.6, 4}, {2, 0.6, 3}}, 2};
    auto sol = solve_mk_exact(mk);
    CHECK(mk_profit(mk, sol) == doctest::Approx(9));
    CHECK(mk_feasible(mk, sol));
    for (const auto& b : sol.bins) CHECK(b.size() == 1);
}

TEST_CASE("mk exact: equals assignment enumeration on n = 10, 3 bins") {
    Rng rng(13);
    for (int t = 0; t < 40; ++t) {
        auto mk = random_mk(rng, 10, 3);
        auto sol = solve_mk_exact(mk);
        CHECK(mk_feasible(mk, sol));
        CHECK(mk_profit(mk, sol) == doctest::Approx(oracle::best_mk_assignment(mk)).epsilon(1e-12));
    }
}

TEST_CASE("mk exact: invariant under item permutation; zero-weight items go to the first bin") {
    Rng rng(14);
    for (int t = 0; t < 20; ++t) {
        auto mk = random_mk(rng, 9, 2);
        auto shuffled = mk;
        std::reverse(shuffled.items.begin(), shuffled.items.end());
        CHECK(mk_profit(mk, solve_mk_exact(mk)) == doctest::Approx(mk_profit(shuffled, solve_mk_exact(shuffled))));
    }
    MkInstance z{{{0, 0.0, 1}, {1, 0.9, 2}}, 1};
    auto sol = solve_mk_exact(z);
    CHECK(mk_profit(z, sol) == doctest::Approx(3));
}

TEST_CASE("mk exact: canonical bin order") {
    MkInstance mk{{{0, 0.6, 1}, {1, 0.6, 1}, {2, 0.3, 1}}, 3};
    auto sol = solve_mk_exact(mk);
    std::vector<std::size_t> firsts;
    bool seen_empty = false;
    for (const auto& b : sol.bins) {
        if (b.empty()) {
            seen_empty = true;
            continue;
        }
        CHECK_FALSE(seen_empty);
        firsts.push_back(*std::min_element(b.begin(), b.end()));
    }
    CHECK(std::is_sorted(firsts.begin(), firsts.end()));
}

TEST_CASE("mk exact: node cap throws with incumbent and bound") {
    Rng rng(15);
    auto mk = random_mk(rng, 60, 6);
    try {
        solve_mk_exact(mk, 10);
        FAIL("expected MkBudgetExceeded");
    } catch (const MkBudgetExceeded& e) {
        CHECK(mk_feasible(mk, e.best()));
        CHECK(e.upper_bound() >= mk_profit(mk, e.best()));
    }
}

TEST_CASE("mk heuristic: saturation, empty input, never worse than FFD") {
    MkInstance fits{{{0, 0.2, 1}, {1, 0.3, 2}, {2, 0.4, 3}}, 1};
    CHECK(mk_profit(fits, solve_mk_heuristic(fits)) == doctest::Approx(6));
    MkInstance empty{{}, 3};
    CHECK(mk_profit(empty, solve_mk_heuristic(empty)) == 0);

    Rng rng(16);
    for (int t = 0; t < 200; ++t) {
        auto mk = random_mk(rng, 5 + t % 40, 1 + t % 6);
        auto h = solve_mk_heuristic(mk);
        CHECK(mk_feasible(mk, h));
        CHECK(mk_profit(mk, h) >= mk_profit(mk, mk_first_fit_decreasing(mk)) - 1e-12);
    }
}

TEST_CASE("mk heuristic: at least half the optimum on n = 10") {
    Rng rng(17);
    double worst = 1.0;
    for (int t = 0; t < 60; ++t) {
        auto mk = random_mk(rng, 10, 1 + t % 4);
        const double opt = mk_profit(mk, solve_mk_exact(mk));
        const double h = mk_profit(mk, solve_mk_heuristic(mk));
        worst = std::min(worst, h / opt);
    }
    MESSAGE("worst heuristic / exact ratio on the suite: " << worst);
    CHECK(worst >= 0.5);
}

TEST_CASE("mk: associated bins are 2-D feasible") {
    for (std::uint64_t seed = 0; seed < 30; ++seed) {
        auto inst = generate({static_cast<Family>(seed % 4), 10, 3, seed + 3, {}});
        auto mk = associate(inst, 1);
        auto sol = lift(solve_mk_exact(mk));
        CHECK(check_solution(inst, sol).feasible());
    }
}

TEST_CASE("mk: associated optimum is at least half the 2-D optimum") {
    for (const auto& spec : oracle::small_suite(24, 1000)) {
        auto inst = generate(spec);
        auto mk = associate(inst, 1);
        CHECK(mk_profit(mk, solve_mk_exact(mk)) >= 0.5 * oracle::best_assignment(inst) - 1e-9);
    }
}

TEST_CASE("first fit: examples") {
    Instance two({{"a", 0.6, 0.6, 1}, {"b", 0.6, 0.6, 1}}, 1);
    CHECK(first_fit_2d(two, FirstFitOrder::Given).size() == 2);
    Instance three({{"a", 0.3, 0.3, 1}, {"b", 0.3, 0.3, 1}, {"c", 0.3, 0.3, 1}}, 1);
    CHECK(first_fit_2d(three, FirstFitOrder::Given).size() == 1);
}

TEST_CASE("first fit: consecutive bins exceed one in combined weight") {
    Rng rng(18);
    for (int t = 0; t < 1000; ++t) {
        auto inst = generate({static_cast<Family>(t % 4), 5 + t % 40, 1, static_cast<std::uint64_t>(t) * 3 + 1, {}});
        std::vector<std::size_t> order(inst.size());
        std::iota(order.begin(), order.end(), 0);
        for (std::size_t k = order.size(); k > 1; --k) std::swap(order[k - 1], order[rng.below(k)]);
        auto bins = first_fit_2d(inst, order, t % 2 ? FirstFitOrder::Given : FirstFitOrder::ByDensityDesc);
        std::size_t packed = 0;
        for (const auto& b : bins) {
            CHECK(is_feasible(inst, b));
            packed += b.size();
        }
        CHECK(packed == inst.size());
        for (std::size_t k = 0; k + 1 < bins.size(); ++k) {
            const auto l1 = load_of(inst, bins[k]);
            const auto l2 = load_of(inst, bins[k + 1]);
            CHECK(l1.w1 + l2.w1 + l1.w2 + l2.w2 > 1.0);
        }
    }
}

TEST_CASE("first fit: density order puts zero-weight items first") {
    Instance inst({{"a", 0.5, 0.5, 10}, {"z", 0.0, 0.0, 0.01}}, 1);
    auto bins = first_fit_2d(inst, FirstFitOrder::ByDensityDesc);
    REQUIRE(bins.size() == 1);
    CHECK(bins[0] == Configuration{0, 1});
}
