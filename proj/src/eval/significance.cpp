#include "jrank/eval/significance.hpp"

#include "jrank/error.hpp"
#include "jrank/rng.hpp"

#include <vector>

namespace jrank::eval {

RandomizationResult approximate_randomization(std::span<const double> a, std::span<const double> b,
                                              std::size_t iterations, std::uint64_t seed) {
    if (a.size() != b.size())
        throw ArgumentError("approximate randomization: " + std::to_string(a.size()) + " vs " +
                            std::to_string(b.size()) + " paired values");
    if (a.empty()) throw ArgumentError("approximate randomization: no queries");
    if (iterations == 0) throw ArgumentError("approximate randomization: iterations must be at least 1");

    std::vector<double> diff(a.size());
    for (std::size_t i = 0; i < a.size(); ++i) diff[i] = a[i] - b[i];
    const double n = static_cast<double>(diff.size());
    double observed = 0.0;
    for (double d : diff) observed += d;

    Rng rng(seed);
    RandomizationResult r;
    r.iterations = iterations;
    r.observed = observed / n;
    for (std::size_t it = 0; it < iterations; ++it) {
        double s = 0.0;
        for (double d : diff) s += (rng.next() >> 63) ? -d : d;
        if (s >= observed) ++r.at_least;
    }
    r.p_value = static_cast<double>(r.at_least + 1) / static_cast<double>(iterations + 1);
    return r;
}

} // namespace jrank::eval
