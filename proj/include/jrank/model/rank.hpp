#pragma once

#include "jrank/model/model.hpp"

#include <string>
#include <vector>

namespace jrank::model {

struct RankedDoc {
    DocNo doc = 0;
    double score = 0.0;
};

struct RankedSentence {
    SentenceRef ref;
    double score = 0.0;
};

/// Ranked output of one query. Documents by score descending then DocNo;
/// sentences by score descending then (DocNo, sentence index).
struct Ranking {
    std::vector<RankedDoc> docs;
    std::vector<RankedSentence> sentences;
};

struct RankLimits {
    std::size_t docs = 10;
    std::size_t sentences = 10;
    void validate() const;
};

/// Per-candidate scores, aligned with PreparedQuery::candidates.
struct CandidateScores {
    std::vector<double> doc;
    /// Sentence scores per candidate, aligned with CandidateInput::sentences.
    std::vector<std::vector<double>> sentence;
};

/// doc-pdrmm document scores (sentence lists left empty).
CandidateScores score_docs(const Model& doc_model, const PreparedQuery& q, const text::TermTable& table);
/// Initial sentence scores of a sentence model; doc = best sentence.
CandidateScores score_sentences(const Model& sentence_model, const PreparedQuery& q, const text::TermTable& table,
                                const std::vector<std::size_t>* only = nullptr);
/// Joint document scores and revised sentence scores.
CandidateScores score_joint(const Model& joint_model, const PreparedQuery& q, const text::TermTable& table);

/// Top documents by doc score; top sentences of those documents only.
Ranking rank_from_scores(const PreparedQuery& q, const CandidateScores& scores, const RankLimits& limits);

/// The lexical baseline, computed directly from the index.
Ranking rank_bm25(std::span<const TermId> query, const RetrievalContext& ctx, const RankLimits& limits);

/// Documents by the document PDRMM, then sentences of the top documents by the sentence PDRMM.
Ranking rank_pipeline(const Model& doc_model, const Model& sentence_model, const PreparedQuery& q,
                      const text::TermTable& table, const RankLimits& limits);
Ranking rank_joint(const Model& joint_model, const PreparedQuery& q, const text::TermTable& table,
                   const RankLimits& limits);
/// Each document takes the best initial score of its sentences.
Ranking rank_sentence_pdrmm(const Model& sentence_model, const PreparedQuery& q, const text::TermTable& table,
                            const RankLimits& limits);

} // namespace jrank::model
