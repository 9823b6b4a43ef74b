#include <doctest.h>

#include <cmath>
#include <vector>

#include "oracles.hpp"
#include "vmk/generator.hpp"
#include "vmk/solvers.hpp"

using namespace vmk;

namespace {

HybridParams params_with(std::uint64_t seed, MkMode mode = MkMode::Exact) {
    HybridParams p;
    p.eps = 0.01;
    p.seed = seed;
    p.mk_mode = mode;
    return p;
}

void check_valid(const Instance& inst, const SolveResult& res) {
    auto rep = check_solution(inst, res.solution);
    CHECK(rep.feasible());
    CHECK(res.solution.bins.size() == static_cast<std::size_t>(inst.bins()));
    CHECK(rep.profit == doctest::Approx(res.report.profit).epsilon(1e-12));
    CHECK(res.report.profit >= 0);
    if (res.report.lp_bound && res.report.lp_converged) {
        CHECK(res.report.profit <= *res.report.lp_bound * (1 + kLpTol) + kLpTol);
    }
}

}  // namespace

TEST_CASE("default ell is ceil(m ln 2)") {
    CHECK(default_ell(1) == 1);
    CHECK(default_ell(2) == 2);
    CHECK(default_ell(3) == 3);
    CHECK(default_ell(10) == 7);
    CHECK(default_ell(100) == 70);
}

TEST_CASE("names round trip") {
    for (auto a : {Algorithm::Hybrid, Algorithm::Baseline, Algorithm::Reduction, Algorithm::Exact, Algorithm::Mck,
                   Algorithm::EpsNice}) {
        CHECK(parse_algorithm(algorithm_name(a)) == a);
    }
    for (auto m : {MkMode::Exact, MkMode::Heuristic, MkMode::Auto}) CHECK(parse_mk_mode(mk_mode_name(m)) == m);
    CHECK_FALSE(parse_algorithm("nope").has_value());
}

TEST_CASE("hybrid: m = 1 samples one configuration and leaves no MK bins") {
    auto inst = generate({Family::Uniform, 8, 1, 5, {}});
    auto res = solve_hybrid(inst, params_with(3));
    CHECK(res.report.ell == 1);
    CHECK(res.solution.bins.size() == 1);
    CHECK(res.report.profit == doctest::Approx(res.report.sampled_profit));
    check_valid(inst, res);
}

TEST_CASE("hybrid: m = 10 samples 7 configurations and fills 3 bins") {
    auto inst = generate({Family::Uniform, 40, 10, 6, {}});
    auto res = solve_hybrid(inst, params_with(4, MkMode::Auto));
    CHECK(res.report.ell == 7);
    CHECK(res.solution.bins.size() == 10);
    check_valid(inst, res);
}

TEST_CASE("hybrid: parameter validation") {
    auto inst = generate({Family::Uniform, 5, 2, 1, {}});
    auto p = params_with(1);
    p.eps = 0.5;
    CHECK_THROWS_AS(solve_hybrid(inst, p), std::invalid_argument);
    p.eps = 0.1;
    p.ell_override = 3;
    CHECK_THROWS_AS(solve_hybrid(inst, p), std::invalid_argument);
}

TEST_CASE("hybrid: same seed, same bins") {
    auto inst = generate({Family::Correlated, 30, 6, 8, {}});
    auto lp = solve_clp(inst, 0.01);
    auto a = solve_hybrid(inst, params_with(99, MkMode::Auto), lp);
    auto b = solve_hybrid(inst, params_with(99, MkMode::Auto), lp);
    CHECK(a.solution == b.solution);
}

TEST_CASE("baseline: degenerate single-column LP") {
    Instance inst({{"a", 0.5, 0.5, 2}, {"b", 0.5, 0.5, 3}}, 3);
    FractionalSolution lp;
    lp.bins = 3;
    lp.pool = {Configuration{0, 1}};
    lp.mass = {3.0};
    lp.value = 15;
    lp.converged = true;
    auto res = solve_sampling_baseline(inst, lp, 1);
    CHECK(res.solution.bins[0] == Configuration{0, 1});
    CHECK(res.solution.bins[1].empty());
    CHECK(res.solution.bins[2].empty());
    CHECK(res.report.profit == doctest::Approx(5));
}

TEST_CASE("baseline: mean profit meets the per-item coverage bound") {
    auto inst = generate({Family::Uniform, 30, 5, 77, {}});
    auto lp = solve_clp(inst, 1e-9);
    const int m = inst.bins();
    // Independent oracle: sum_i p_i (1 - (1 - s_i / m)^m) from the LP marginals.
    double expected = 0.0;
    auto cov = lp.coverage(inst.size());
    for (std::size_t i = 0; i < inst.size(); ++i) {
        expected += inst.item(i).profit * (1 - std::pow(1 - cov[i] / m, m));
    }
    CHECK(expected >= (1 - std::pow(1 - 1.0 / m, m)) * lp.value - 1e-9);
    const int trials = 500;
    double sum = 0, sq = 0;
    for (int t = 0; t < trials; ++t) {
        auto res = solve_sampling_baseline(inst, lp, derive_seed(21, static_cast<std::uint64_t>(t)));
        sum += res.report.profit;
        sq += res.report.profit * res.report.profit;
    }
    const double mean = sum / trials;
    const double se = std::sqrt((sq - trials * mean * mean) / (trials - 1) / trials);
    CHECK(std::abs(mean - expected) <= 3 * se + 1e-9);
    CHECK(mean >= (1 - std::pow(1 - 1.0 / m, m)) * lp.value - 3 * se);
}

TEST_CASE("reduction: lossless when the optimum fits under max weights") {
    Instance inst({{"a", 0.5, 0.1, 3}, {"b", 0.4, 0.2, 2}, {"c", 0.3, 0.3, 1}}, 2);
    auto res = solve_reduction(inst, 0.1);
    CHECK(res.report.profit == doctest::Approx(6));
    Instance empty({}, 2);
    CHECK(solve_reduction(empty, 0.1).report.profit == 0);
}

TEST_CASE("reduction: at least half of the optimum on every small instance") {
    for (const auto& spec : oracle::small_suite(30, 77)) {
        auto inst = generate(spec);
        auto res = solve_reduction(inst, 0.1);
        check_valid(inst, res);
        CHECK(res.report.profit >= 0.5 * oracle::best_assignment(inst) - 1e-9);
    }
}

TEST_CASE("exact: examples") {
    Instance one({{"a", 0.7, 0.9, 4}}, 1);
    auto r1 = solve_exact(one);
    CHECK(r1.complete);
    CHECK(r1.profit == doctest::Approx(4));
    Instance three({{"a", 0.6, 0.6, 1}, {"b", 0.6, 0.6, 1}, {"c", 0.6, 0.6, 1}}, 2);
    auto r3 = solve_exact(three);
    CHECK(r3.complete);
    CHECK(r3.profit == doctest::Approx(2));
}

TEST_CASE("exact, mck and enumeration agree") {
    for (const auto& spec : oracle::small_suite(30, 5150)) {
        auto inst = generate(spec);
        const double brute = oracle::best_assignment(inst);
        auto ex = solve_exact(inst);
        REQUIRE(ex.complete);
        CHECK(ex.profit == doctest::Approx(brute).epsilon(1e-12));
        CHECK(check_solution(inst, ex.solution).feasible());
        CHECK(solution_profit(inst, ex.solution) == doctest::Approx(ex.profit).epsilon(1e-12));
        if (spec.n <= 8 || spec.m <= 2) {
            auto mck = reduce_to_mck(inst);
            auto ms = solve_mck_exact(mck);
            REQUIRE(ms.complete);
            CHECK(ms.profit == doctest::Approx(brute).epsilon(1e-12));
            auto sol = mck_to_solution(inst, mck, ms);
            CHECK(check_solution(inst, sol).feasible());
            CHECK(solution_profit(inst, sol) == doctest::Approx(ms.profit).epsilon(1e-12));
        }
    }
}

TEST_CASE("mck: shape of the reduction") {
    auto inst = generate({Family::Uniform, 6, 1, 2, {}});
    auto mck = reduce_to_mck(inst);
    CHECK(mck.dimensions == 2);
    CHECK(mck.classes.size() == 6);
    for (const auto& cls : mck.classes) CHECK(cls.size() == 1);

    auto inst3 = generate({Family::Uniform, 5, 3, 2, {}});
    auto mck3 = reduce_to_mck(inst3);
    CHECK(mck3.dimensions == 6);
    for (std::size_t i = 0; i < mck3.classes.size(); ++i) {
        REQUIRE(mck3.classes[i].size() == 3);
        for (const auto& c : mck3.classes[i]) {
            CHECK(c.item == i);
            for (int d = 0; d < 6; ++d) {
                const double w = c.weight[static_cast<std::size_t>(d)];
                if (d / 2 != c.bin) {
                    CHECK(w == 0.0);
                } else {
                    CHECK(w == (d % 2 ? inst3.item(i).w2 : inst3.item(i).w1));
                }
            }
        }
    }
}

TEST_CASE("mck: n = 8, m = 2 equals the exact oracle") {
    for (std::uint64_t seed = 0; seed < 15; ++seed) {
        auto inst = generate({static_cast<Family>(seed % 4), 8, 2, seed + 11, {}});
        auto ms = solve_mck_exact(reduce_to_mck(inst));
        CHECK(ms.profit == doctest::Approx(solve_exact(inst).profit).epsilon(1e-12));
    }
}

TEST_CASE("degenerate hybrid: ell = 0 is the reduction, ell = m is the baseline") {
    for (const auto& spec : oracle::small_suite(20, 8080)) {
        auto inst = generate(spec);
        auto lp = solve_clp(inst, 1e-9);
        auto p = params_with(spec.seed);
        p.ell_override = 0;
        CHECK(solve_hybrid(inst, p, lp).report.profit ==
              doctest::Approx(solve_reduction(inst, 0.01, MkMode::Exact).report.profit).epsilon(1e-12));
        p.ell_override = inst.bins();
        for (std::uint64_t s = 0; s < 5; ++s) {
            p.seed = s;
            CHECK(solve_hybrid(inst, p, lp).solution == solve_sampling_baseline(inst, lp, s).solution);
        }
    }
}

TEST_CASE("every solver returns feasible solutions within the LP bound") {
    for (std::uint64_t seed = 0; seed < 12; ++seed) {
        auto inst = generate({static_cast<Family>(seed % 4), 25, static_cast<int>(2 + seed % 5), seed + 600, {}});
        auto lp = solve_clp(inst, 0.01);
        auto p = params_with(seed, MkMode::Auto);
        check_valid(inst, solve_hybrid(inst, p, lp));
        check_valid(inst, solve_sampling_baseline(inst, lp, seed));
        auto red = solve_reduction(inst, 0.01, MkMode::Auto);
        red.report.lp_bound = lp.upper_bound;
        red.report.lp_converged = lp.converged;
        check_valid(inst, red);
        auto inner = [&](const Instance& sub) { return solve_hybrid(sub, p).solution; };
        auto nice = eps_nice_wrap(inst, 0.1, default_prefix_budget(inst, 0.1), inner);
        nice.report.lp_bound = lp.upper_bound;
        nice.report.lp_converged = lp.converged;
        check_valid(inst, nice);
    }
}

TEST_CASE("eps-nice wrap: saturated prefix is the top-m First-Fit bins") {
    auto inst = generate({Family::Uniform, 12, 2, 4, {}});
    int inner_calls = 0;
    auto inner = [&](const Instance& sub) {
        ++inner_calls;
        return Solution{std::vector<Configuration>(static_cast<std::size_t>(sub.bins()))};
    };
    auto res = eps_nice_wrap(inst, 0.1, 1e9, inner);
    CHECK(inner_calls == 0);
    auto ff = first_fit_2d(inst, FirstFitOrder::ByDensityDesc);
    std::vector<double> bin_profits;
    for (const auto& b : ff) bin_profits.push_back(profit_of(inst, b));
    std::sort(bin_profits.rbegin(), bin_profits.rend());
    double top = 0;
    for (int b = 0; b < std::min<int>(2, static_cast<int>(bin_profits.size())); ++b) top += bin_profits[b];
    CHECK(res.report.profit == doctest::Approx(top));
    check_valid(inst, res);
}

TEST_CASE("eps-nice wrap: empty prefix defers to the inner solver") {
    auto inst = generate({Family::Correlated, 10, 2, 9, {}});
    auto inner = [](const Instance& sub) { return solve_reduction(sub, 0.1).solution; };
    auto wrapped = eps_nice_wrap(inst, 0.1, 0.0, inner);
    CHECK(wrapped.report.profit == doctest::Approx(solve_reduction(inst, 0.1).report.profit));
}

TEST_CASE("eps-nice wrap: a tiny budget takes only the densest item") {
    Instance inst({{"a", 0.5, 0.5, 1}, {"b", 0.1, 0.1, 5}, {"c", 0.4, 0.2, 1}}, 1);
    std::vector<std::string> seen;
    auto inner = [&](const Instance& sub) {
        for (const auto& it : sub.items()) seen.push_back(it.id);
        return Solution{{Configuration{}}};
    };
    eps_nice_wrap(inst, 0.1, 1e-12, inner);
    CHECK(seen == std::vector<std::string>{"a", "c"});
}

TEST_CASE("eps-nice wrap: zero-weight positive items are always in the prefix") {
    Instance inst({{"a", 0.3, 0.3, 10}, {"b", 0.4, 0.4, 1}, {"z", 0.0, 0.0, 0.5}, {"y", 0.0, 0.0, 0.2}}, 1);
    std::vector<std::string> seen;
    auto inner = [&](const Instance& sub) {
        for (const auto& it : sub.items()) seen.push_back(it.id);
        return Solution{{Configuration{}}};
    };
    auto res = eps_nice_wrap(inst, 0.1, 1e-12, inner);
    // z and y leave the prefix weight at zero, so the densest weighted item joins too
    CHECK(seen == std::vector<std::string>{"b"});
    CHECK(res.solution.bins[0].contains(*inst.index_of("z")));
    CHECK(res.solution.bins[0].contains(*inst.index_of("y")));
}

TEST_CASE("eps-nice predicate") {
    Instance one({{"a", 0.2, 0.3, 7}}, 5);
    auto rep = is_eps_nice(one, 0.1, 7);
    CHECK_FALSE(rep.nice);
    CHECK_FALSE(rep.bins_condition);
    CHECK(rep.max_config_profit_bound == doctest::Approx(7));

    auto inst = generate({Family::Uniform, 11, 1000000, 3, {}});
    auto r = is_eps_nice(inst, 0.3, 100);
    CHECK_FALSE(r.nice);
    std::vector<double> v;
    for (const auto& it : inst.items()) v.push_back(it.profit);
    CHECK(r.max_config_profit_bound == doctest::Approx(oracle::best_subset_value(inst, v)));
    CHECK(r.m_logloglog < r.m_threshold_logloglog);
    CHECK_THROWS_AS(is_eps_nice(inst, 0.1, 0.0), std::invalid_argument);
}
