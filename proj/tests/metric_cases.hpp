#pragma once

#include "jrank/eval/metrics.hpp"

#include <set>
#include <string>
#include <vector>

namespace jrank::testing {

// Worked by hand. Recall is at `k`.
struct MetricCase {
    const char* name;
    std::vector<std::string> ranked;
    std::set<std::string> gold;
    std::size_t cutoff;
    eval::ApDenominator mode;
    double ap;
    double rr;
    std::size_t k;
    double recall;
};

inline std::vector<std::string> filler(std::size_t n, std::vector<std::pair<std::size_t, std::string>> at = {}) {
    std::vector<std::string> out;
    for (std::size_t i = 0; i < n; ++i) out.push_back("x" + std::to_string(i));
    for (const auto& [rank, id] : at) out[rank - 1] = id;
    return out;
}

inline std::vector<MetricCase> metric_cases() {
    using eval::ApDenominator;
    const auto classic = ApDenominator::classic;
    std::set<std::string> twelve;
    std::vector<std::string> twelve_ranked;
    for (int i = 0; i < 12; ++i) {
        twelve.insert("g" + std::to_string(i));
        twelve_ranked.push_back("g" + std::to_string(i));
    }
    return {
        {"single gold at the top", {"a", "b", "c"}, {"a"}, 10, classic, 1.0, 1.0, 1, 1.0},
        {"two golds at ranks 2 and 4", {"x", "a", "y", "b"}, {"a", "b"}, 10, classic, 0.5, 0.5, 2, 0.5},
        {"nothing relevant retrieved", {"x", "y", "z"}, {"a"}, 10, classic, 0.0, 0.0, 10, 0.0},
        {"empty gold set", {"x", "y"}, {}, 10, classic, 0.0, 0.0, 10, 0.0},
        {"three of four golds", {"a", "x", "b", "y", "c"}, {"a", "b", "c", "d"}, 10, classic,
         (1.0 + 2.0 / 3.0 + 3.0 / 5.0) / 4.0, 1.0, 2, 0.25},
        {"gold at rank 11 is past the cutoff", filler(12, {{11, "a"}}), {"a"}, 10, classic, 0.0, 1.0 / 11.0, 10, 0.0},
        {"gold at rank 10 still counts", filler(10, {{10, "a"}}), {"a"}, 10, classic, 0.1, 0.1, 10, 1.0},
        {"twelve golds, classic divides by 12", twelve_ranked, twelve, 10, classic, 10.0 / 12.0, 1.0, 10, 10.0 / 12.0},
        {"twelve golds, official cutoff-10 divides by 10", twelve_ranked, twelve, 10, ApDenominator::min_r_cutoff,
         1.0, 1.0, 10, 10.0 / 12.0},
        {"min-r-cutoff equals classic below the cutoff", {"g1", "x", "g2"}, {"g1", "g2", "g3"}, 10,
         ApDenominator::min_r_cutoff, (1.0 + 2.0 / 3.0) / 3.0, 1.0, 3, 2.0 / 3.0},
        {"unretrieved gold halves AP", {"a"}, {"a", "b"}, 10, classic, 0.5, 1.0, 1, 0.5},
        {"all retrieved golds", {"a", "b", "c"}, {"a", "b", "c"}, 10, classic, 1.0, 1.0, 2, 2.0 / 3.0},
        {"gold second only", {"x", "a"}, {"a"}, 10, classic, 0.5, 0.5, 1, 0.0},
        {"custom cutoff of 2", {"a", "x", "b"}, {"a", "b"}, 2, classic, 0.5, 1.0, 3, 1.0},
        {"gold at rank 11, official convention", filler(12, {{1, "a"}, {11, "b"}}), {"a", "b"}, 10,
         ApDenominator::min_r_cutoff, 0.5, 1.0, 10, 0.5},
    };
}

} // namespace jrank::testing
