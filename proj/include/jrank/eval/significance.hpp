#pragma once

#include <cstddef>
#include <cstdint>
#include <span>

namespace jrank::eval {

struct RandomizationResult {
    double observed = 0.0; // mean(a) - mean(b)
    double p_value = 1.0;
    std::size_t at_least = 0; // permutations with delta >= observed
    std::size_t iterations = 0;
};

/// Single-tailed paired approximate randomization. Every iteration swaps
/// each query's pair with probability 1/2;
/// p = (#{delta_perm >= delta_obs} + 1) / (iterations + 1).
/// Throws ArgumentError on a length mismatch, empty input or zero iterations.
RandomizationResult approximate_randomization(std::span<const double> a, std::span<const double> b,
                                              std::size_t iterations = 10000, std::uint64_t seed = 0);

} // namespace jrank::eval
