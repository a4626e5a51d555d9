#pragma once

#include "jrank/text/term_table.hpp"

#include <compare>
#include <cstdint>
#include <span>
#include <string>
#include <unordered_map>
#include <vector>

namespace jrank::index {

using text::TermId;
/// Position of a document in the index (the corpus order).
using DocNo = std::uint32_t;

struct Bm25Params {
    double k1 = 0.9;
    double b = 0.4;
    /// Throws ArgumentError unless k1 > 0 and b in [0, 1].
    void validate() const;
};

struct Posting {
    DocNo doc;
    std::uint32_t tf;
    friend bool operator==(const Posting&, const Posting&) = default;
};

/// A candidate of one query. Lists are ordered by bm25 descending, then doc ascending.
struct ScoredCandidate {
    DocNo doc = 0;
    double bm25 = 0.0;
    double bm25_z = 0.0;
};

/// Population z-scores; all zeros when the standard deviation is below 1e-12.
std::vector<double> z_normalize(std::span<const double> scores);

/// Term-at-a-time BM25 index over term-id documents. Frozen after build.
///
/// IDF is the smoothed ln((N - df + 0.5) / (df + 0.5) + 1) over the index's
/// own statistics.
class InvertedIndex {
public:
    InvertedIndex() = default;

    /// Anonymous documents, numbered in order (used for transient sentence indexes).
    static InvertedIndex build(std::span<const std::span<const TermId>> documents);
    /// Named documents; throws DataError on a duplicate id.
    static InvertedIndex build(std::span<const std::string> ids,
                               std::span<const std::vector<TermId>> documents);

    std::size_t document_count() const noexcept { return lengths_.size(); }
    double average_length() const noexcept { return avgdl_; }
    std::uint32_t length(DocNo doc) const;
    const std::string& doc_id(DocNo doc) const;
    const std::vector<std::string>& doc_ids() const noexcept { return ids_; }

    const std::vector<Posting>& postings(TermId term) const;
    std::size_t df(TermId term) const { return postings(term).size(); }
    double idf(TermId term) const;
    /// Terms with at least one posting, ascending.
    std::vector<TermId> terms() const;

    /// BM25 of one document; throws ArgumentError for an unknown doc.
    double score(std::span<const TermId> query, DocNo doc, const Bm25Params& params) const;
    /// BM25 of every document, indexed by DocNo.
    std::vector<double> score_all(std::span<const TermId> query, const Bm25Params& params) const;
    /// Top n by BM25 (ties by ascending DocNo), with bm25_z over the returned list.
    /// Zero-scored documents are included when fewer than n documents match.
    std::vector<ScoredCandidate> retrieve(std::span<const TermId> query, const Bm25Params& params,
                                          std::size_t n) const;

    /// Binary file, little-endian; see README for the layout. Terms are stored
    /// as strings so a load can remap them onto any table.
    void save(const std::string& path, const text::TermTable& table, const Bm25Params& params) const;
    /// Terms missing from `table` are dropped. Returns the stored parameters in `params`.
    static InvertedIndex load(const std::string& path, const text::TermTable& table,
                              Bm25Params* params = nullptr);

    static constexpr std::uint32_t kFormatVersion = 1;

    friend bool operator==(const InvertedIndex&, const InvertedIndex&) = default;

private:
    double term_weight(TermId term, std::uint32_t tf, std::uint32_t len, const Bm25Params& p) const;
    void finish();

    std::unordered_map<TermId, std::vector<Posting>> postings_;
    std::vector<std::uint32_t> lengths_;
    std::vector<std::string> ids_;
    double avgdl_ = 0.0;
};

struct SentenceRef {
    DocNo doc = 0;
    std::uint32_t sentence = 0;
    friend auto operator<=>(const SentenceRef&, const SentenceRef&) = default;
};

struct ScoredSentence {
    SentenceRef ref;
    double bm25 = 0.0;
};

/// Read access to the sentences of indexed documents.
class SentenceSource {
public:
    virtual ~SentenceSource() = default;
    virtual std::size_t sentence_count(DocNo doc) const = 0;
    virtual std::span<const TermId> sentence_terms(DocNo doc, std::uint32_t sentence) const = 0;
};

/// A BM25 index over every sentence of `docs`, each sentence a pseudo-document.
class SentenceCollection {
public:
    SentenceCollection(std::span<const DocNo> docs, const SentenceSource& source);

    const std::vector<SentenceRef>& refs() const noexcept { return refs_; }
    const InvertedIndex& index() const noexcept { return index_; }
    /// BM25 of every sentence, aligned with refs().
    std::vector<double> score_all(std::span<const TermId> query, const Bm25Params& params) const {
        return index_.score_all(query, params);
    }

private:
    std::vector<SentenceRef> refs_;
    InvertedIndex index_;
};

/// Orders by score descending, then by ref ascending, and keeps at most n.
std::vector<ScoredSentence> top_sentences(std::vector<ScoredSentence> all, std::size_t n);

struct PipelineResult {
    std::vector<ScoredCandidate> docs;
    std::vector<ScoredSentence> sentences;
};

/// The BM25+BM25 baseline: top n_docs documents, then BM25 recomputed over
/// the sentences of exactly those documents, keeping the top n_sentences.
PipelineResult bm25_pipeline(std::span<const TermId> query, const InvertedIndex& index,
                             const SentenceSource& sentences, const Bm25Params& params,
                             std::size_t n_docs, std::size_t n_sentences);

} // namespace jrank::index
