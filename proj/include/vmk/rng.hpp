#pragma once

#include <cstdint>
#include <random>
#include <string_view>

namespace vmk {

// Seedable 64-bit generator. The algorithm name is recorded in solve reports so
// experiments can be reproduced.
class Rng {
public:
    static constexpr std::string_view kAlgorithm = "mt19937_64";

    explicit Rng(std::uint64_t seed) : engine_(seed) {}

    std::uint64_t next() { return engine_(); }
    // Uniform on [0,1) with 53 random bits.
    double uniform01() { return static_cast<double>(engine_() >> 11) * 0x1.0p-53; }
    double uniform(double lo, double hi) { return lo + (hi - lo) * uniform01(); }
    // Uniform on {0, ..., n-1}; n > 0.
    std::uint64_t below(std::uint64_t n);

    std::mt19937_64& engine() { return engine_; }

private:
    std::mt19937_64 engine_;
};

// Mixes a base seed with a trial index into an independent stream seed.
std::uint64_t derive_seed(std::uint64_t base, std::uint64_t index);

}  // namespace vmk
