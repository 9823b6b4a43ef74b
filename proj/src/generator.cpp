#include "vmk/generator.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <numeric>
#include <random>
#include <stdexcept>

#include "vmk/rng.hpp"

namespace vmk {

namespace {

std::string item_id(int i) {
    char buf[16];
    std::snprintf(buf, sizeof(buf), "i%05d", i);
    return buf;
}

double param(const GeneratorSpec& spec, std::size_t k, double fallback) {
    return k < spec.params.size() ? spec.params[k] : fallback;
}

}  // namespace

std::string_view family_name(Family f) {
    switch (f) {
        case Family::Uniform: return "uniform";
        case Family::Correlated: return "correlated";
        case Family::ZipfProfit: return "zipfProfit";
        case Family::Clustered: return "clustered";
    }
    return "unknown";
}

std::optional<Family> parse_family(std::string_view name) {
    for (auto f : {Family::Uniform, Family::Correlated, Family::ZipfProfit, Family::Clustered}) {
        if (family_name(f) == name) return f;
    }
    return std::nullopt;
}

Instance generate(const GeneratorSpec& spec) {
    if (spec.n < 0) throw std::invalid_argument("generate: n must be nonnegative");
    if (spec.m < 1) throw std::invalid_argument("generate: m must be >= 1");
    Rng rng(spec.seed);
    std::vector<Item> items;
    items.reserve(static_cast<std::size_t>(spec.n));

    switch (spec.family) {
        case Family::Uniform:
            for (int i = 0; i < spec.n; ++i) {
                const double w1 = rng.uniform(0.05, 0.95);
                const double w2 = rng.uniform(0.05, 0.95);
                items.push_back({item_id(i), w1, w2, rng.uniform(0.1, 1.0)});
            }
            break;
        case Family::Correlated:
            for (int i = 0; i < spec.n; ++i) {
                const double w1 = rng.uniform(0.05, 0.95);
                const double w2 = rng.uniform(0.05, 0.95);
                items.push_back({item_id(i), w1, w2, w1 + w2 + rng.uniform(0.0, 0.2)});
            }
            break;
        case Family::ZipfProfit: {
            const double s = param(spec, 0, 1.0);
            std::vector<int> rank(static_cast<std::size_t>(spec.n));
            std::iota(rank.begin(), rank.end(), 1);
            for (std::size_t k = rank.size(); k > 1; --k) {
                std::swap(rank[k - 1], rank[rng.below(k)]);
            }
            for (int i = 0; i < spec.n; ++i) {
                const double w1 = rng.uniform(0.05, 0.95);
                const double w2 = rng.uniform(0.05, 0.95);
                items.push_back({item_id(i), w1, w2, std::pow(static_cast<double>(rank[i]), -s)});
            }
            break;
        }
        case Family::Clustered: {
            const int k = std::max(1, static_cast<int>(param(spec, 0, 3.0)));
            const double spread = param(spec, 1, 0.05);
            std::vector<std::pair<double, double>> centers;
            for (int c = 0; c < k; ++c) centers.emplace_back(rng.uniform(0.1, 0.9), rng.uniform(0.1, 0.9));
            std::normal_distribution<double> noise(0.0, spread);
            for (int i = 0; i < spec.n; ++i) {
                const auto& [c1, c2] = centers[rng.below(static_cast<std::uint64_t>(k))];
                const double w1 = std::clamp(c1 + noise(rng.engine()), 0.01, 1.0);
                const double w2 = std::clamp(c2 + noise(rng.engine()), 0.01, 1.0);
                items.push_back({item_id(i), w1, w2, rng.uniform(0.1, 1.0)});
            }
            break;
        }
    }
    return Instance(std::move(items), spec.m);
}

}  // namespace vmk
