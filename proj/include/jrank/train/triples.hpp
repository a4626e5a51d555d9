#pragma once

#include "jrank/model/features.hpp"

#include <cstdint>
#include <span>
#include <vector>

namespace jrank::train {

/// Indices into a list of prepared queries and into that query's candidates.
/// Sentence labels are the candidates' SentenceInput::gold flags.
struct TrainingTriple {
    std::size_t query = 0;
    std::size_t positive = 0;
    std::size_t negative = 0;
    friend bool operator==(const TrainingTriple&, const TrainingTriple&) = default;
};

/// For every gold candidate of every query, one uniformly drawn non-gold
/// candidate of the same query. Queries without a gold or without a non-gold
/// candidate give nothing.
std::vector<TrainingTriple> make_triples(std::span<const model::PreparedQuery> queries, std::uint64_t seed);

/// Seed of the triples of a given epoch.
std::uint64_t epoch_seed(std::uint64_t seed, std::size_t epoch);

} // namespace jrank::train
