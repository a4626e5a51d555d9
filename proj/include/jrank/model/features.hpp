#pragma once

#include "jrank/ad/array.hpp"
#include "jrank/data/corpus.hpp"
#include "jrank/index/bm25.hpp"
#include "jrank/text/term_table.hpp"

#include <array>
#include <cstddef>
#include <set>
#include <span>
#include <string>
#include <vector>

namespace jrank::model {

using index::DocNo;
using index::SentenceRef;
using text::TermId;

inline constexpr std::size_t kDocExtraCount = 4;
inline constexpr std::size_t kSentenceExtraCount = 10;
/// The IDF-share ratio is already in [0, 1] and is never z-normalized.
inline constexpr std::size_t kIdfShareFeature = 6;

using DocExtra = std::array<double, kDocExtraCount>;
using SentenceExtra = std::array<double, kSentenceExtraCount>;

/// [bm25 z-score, fraction of distinct q-terms in d, IDF-weighted fraction,
/// fraction of distinct q-term bigrams in d].
DocExtra doc_extra_features(std::span<const TermId> query, std::span<const TermId> doc, double bm25_z,
                            const text::TermTable& table);

/// [char length of q, char length of s, shared tokens, shared tokens without
/// stopwords, shared IDF, shared IDF without stopwords, IDF share, shared
/// bigrams, BM25 of s in the candidate sentence collection, BM25 of its document].
SentenceExtra sentence_extra_features(std::span<const TermId> query, std::size_t query_chars,
                                      const data::Sentence& sentence, double sentence_bm25, double doc_bm25,
                                      const text::TermTable& table);

/// Exact-match matrix: 1 where the term ids agree.
ad::Array exact_match(std::span<const TermId> query, std::span<const TermId> text);

/// Max, mean and mean of the top min(k, m) entries of every row, as (n x 3).
ad::Array pool_rows(const ad::Array& sim, std::size_t k);

/// Pooled static-cosine and exact-match views, (n x 6): the parameter-free
/// columns 4-9 of the pooled similarity matrix.
ad::Array static_pooled(const ad::Array& query_static, std::span<const TermId> query_terms,
                        const ad::Array& text_static, std::span<const TermId> text_terms, std::size_t k);

struct QueryInput {
    std::vector<TermId> terms;
    std::size_t char_length = 0;
    ad::Array embeddings; // (n x d) static vectors
    ad::Array idf;        // (n x 1)
};

/// Tokens of a text plus its query-dependent, parameter-free pooled views.
struct TextInput {
    std::vector<TermId> terms;
    ad::Array static_pooled; // (n x 6)
};

struct SentenceInput {
    std::uint32_t index = 0;
    TextInput text;
    SentenceExtra extra{};
    bool gold = false;
};

struct CandidateInput {
    DocNo doc = 0;
    double bm25 = 0.0;
    double bm25_z = 0.0;
    bool gold = false;
    TextInput text;
    DocExtra extra{};
    /// Non-empty sentences only, in document order.
    std::vector<SentenceInput> sentences;
};

/// A question with its BM25 top-N candidates and every input the models need.
struct PreparedQuery {
    std::string id;
    QueryInput query;
    std::vector<CandidateInput> candidates;
    std::set<DocNo> gold_docs;
    std::set<SentenceRef> gold_snippets;
    std::size_t top_k = 0;
};

struct RetrievalContext {
    const data::Corpus& corpus;
    const text::TermTable& table;
    const index::InvertedIndex& index;
    index::Bm25Params bm25;
    std::size_t top_n = 100;
};

QueryInput make_query_input(std::span<const TermId> terms, std::size_t char_length, const text::TermTable& table);

/// Retrieves the top-N candidates and computes all features. Candidates
/// without a single token are dropped. A question with no tokens is treated
/// as the single unknown term.
PreparedQuery prepare_query(const data::Question& question, const RetrievalContext& ctx, std::size_t top_k);

/// Same for many questions, spread over `jobs` threads; order is preserved.
std::vector<PreparedQuery> prepare_queries(std::span<const data::Question> questions, const RetrievalContext& ctx,
                                           std::size_t top_k, std::size_t jobs = 1);

/// Per-feature z-normalization of sentence extras with statistics from
/// training data. An unfitted normalizer passes values through.
struct FeatureNorm {
    std::vector<double> mean;
    std::vector<double> stddev;

    bool fitted() const noexcept { return !mean.empty(); }
    void fit(std::span<const SentenceExtra> samples);
    ad::Array apply(const SentenceExtra& raw) const;
};

} // namespace jrank::model
