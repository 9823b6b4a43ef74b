#pragma once

#include <cstdint>
#include <optional>
#include <string_view>
#include <vector>

#include "vmk/model.hpp"

namespace vmk {

enum class Family { Uniform, Correlated, ZipfProfit, Clustered };

std::string_view family_name(Family f);
std::optional<Family> parse_family(std::string_view name);

// Family parameters, all optional:
//   zipfProfit: params[0] = exponent s (default 1), profit of rank r is r^-s
//   clustered:  params[0] = cluster count (default 3), params[1] = spread (default 0.05)
struct GeneratorSpec {
    Family family = Family::Uniform;
    int n = 0;
    int m = 1;
    std::uint64_t seed = 0;
    std::vector<double> params;
};

// Deterministic in the spec. Weights of uniform, correlated and zipfProfit
// items are U[0.05, 0.95] per coordinate; uniform profits are U[0.1, 1];
// correlated profits are w1 + w2 + U[0, 0.2].
Instance generate(const GeneratorSpec& spec);

}  // namespace vmk
