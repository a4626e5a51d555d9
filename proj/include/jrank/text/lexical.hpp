#pragma once

#include "jrank/text/term_table.hpp"

#include <cstdint>
#include <span>
#include <unordered_set>
#include <vector>

namespace jrank::text {

/// Word-overlap statistics between a query and a text. Counts are over
/// distinct query terms; bigrams are adjacent pairs including stopwords.
struct LexicalOverlap {
    double shared_tokens = 0.0;
    double shared_tokens_no_stop = 0.0;
    double shared_idf = 0.0;
    double shared_idf_no_stop = 0.0;
    /// shared_idf / sum of IDF of the distinct query terms; 0 when that is 0.
    double idf_share = 0.0;
    double shared_bigrams = 0.0;
};

LexicalOverlap lexical_overlap(std::span<const TermId> query, std::span<const TermId> text,
                               const TermTable& table);

/// Distinct adjacent pairs packed as (first << 32) | second.
std::unordered_set<std::uint64_t> bigrams(std::span<const TermId> tokens);

/// Distinct terms in order of first occurrence.
std::vector<TermId> distinct_terms(std::span<const TermId> tokens);

} // namespace jrank::text
