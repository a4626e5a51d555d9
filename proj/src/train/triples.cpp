#include "jrank/train/triples.hpp"

#include "jrank/rng.hpp"

namespace jrank::train {

std::vector<TrainingTriple> make_triples(std::span<const model::PreparedQuery> queries, std::uint64_t seed) {
    Rng rng(seed);
    std::vector<TrainingTriple> out;
    std::vector<std::size_t> gold, other;
    for (std::size_t q = 0; q < queries.size(); ++q) {
        gold.clear();
        other.clear();
        const auto& cands = queries[q].candidates;
        for (std::size_t i = 0; i < cands.size(); ++i) (cands[i].gold ? gold : other).push_back(i);
        if (other.empty()) continue;
        for (std::size_t g : gold) out.push_back({q, g, other[rng.below(other.size())]});
    }
    return out;
}

std::uint64_t epoch_seed(std::uint64_t seed, std::size_t epoch) {
    return splitmix64(seed ^ splitmix64(0x7269706c65ULL + epoch));
}

} // namespace jrank::train
