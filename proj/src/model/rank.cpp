#include "jrank/model/rank.hpp"

#include "jrank/error.hpp"

#include <algorithm>
#include <numeric>

namespace jrank::model {

void RankLimits::validate() const {
    if (docs == 0 || sentences == 0) throw ArgumentError("N_d and N_s must be at least 1");
}

CandidateScores score_docs(const Model& m, const PreparedQuery& q, const text::TermTable& table) {
    CandidateScores out;
    out.sentence.resize(q.candidates.size());
    ad::Graph g(ad::Graph::Mode::inference);
    const auto qv = m.scorer().encode_query(g, q.query);
    for (const auto& c : q.candidates) out.doc.push_back(m.doc_score(g, qv, c, table).item());
    return out;
}

CandidateScores score_sentences(const Model& m, const PreparedQuery& q, const text::TermTable& table,
                                const std::vector<std::size_t>* only) {
    CandidateScores out;
    out.doc.assign(q.candidates.size(), -std::numeric_limits<double>::infinity());
    out.sentence.resize(q.candidates.size());
    ad::Graph g(ad::Graph::Mode::inference);
    const auto qv = m.scorer().encode_query(g, q.query);
    auto run = [&](std::size_t i) {
        const auto s = m.sentence_scores(g, qv, q.candidates[i], table);
        const auto v = s.value().values();
        out.sentence[i].assign(v.begin(), v.end());
        out.doc[i] = *std::max_element(out.sentence[i].begin(), out.sentence[i].end());
    };
    if (only)
        for (std::size_t i : *only) run(i);
    else
        for (std::size_t i = 0; i < q.candidates.size(); ++i) run(i);
    return out;
}

CandidateScores score_joint(const Model& m, const PreparedQuery& q, const text::TermTable& table) {
    CandidateScores out;
    ad::Graph g(ad::Graph::Mode::inference);
    const auto qv = m.scorer().encode_query(g, q.query);
    for (const auto& c : q.candidates) {
        const auto j = m.joint(g, qv, c, table);
        out.doc.push_back(j.doc_score.item());
        const auto v = j.revised.value().values();
        out.sentence.emplace_back(v.begin(), v.end());
    }
    return out;
}

namespace {

std::vector<std::size_t> top_candidates(const PreparedQuery& q, const std::vector<double>& doc, std::size_t n) {
    std::vector<std::size_t> order(q.candidates.size());
    std::iota(order.begin(), order.end(), 0);
    const std::size_t k = std::min(n, order.size());
    std::partial_sort(order.begin(), order.begin() + static_cast<std::ptrdiff_t>(k), order.end(),
                      [&](std::size_t a, std::size_t b) {
                          if (doc[a] != doc[b]) return doc[a] > doc[b];
                          return q.candidates[a].doc < q.candidates[b].doc;
                      });
    order.resize(k);
    return order;
}

} // namespace

Ranking rank_from_scores(const PreparedQuery& q, const CandidateScores& scores, const RankLimits& limits) {
    limits.validate();
    Ranking r;
    const auto top = top_candidates(q, scores.doc, limits.docs);
    for (std::size_t i : top) {
        r.docs.push_back({q.candidates[i].doc, scores.doc[i]});
        const auto& sents = q.candidates[i].sentences;
        const auto& ss = scores.sentence[i];
        if (ss.size() != sents.size()) continue;
        for (std::size_t s = 0; s < sents.size(); ++s)
            r.sentences.push_back({{q.candidates[i].doc, sents[s].index}, ss[s]});
    }
    const std::size_t k = std::min(limits.sentences, r.sentences.size());
    std::partial_sort(r.sentences.begin(), r.sentences.begin() + static_cast<std::ptrdiff_t>(k), r.sentences.end(),
                      [](const RankedSentence& a, const RankedSentence& b) {
                          if (a.score != b.score) return a.score > b.score;
                          return a.ref < b.ref;
                      });
    r.sentences.resize(k);
    return r;
}

Ranking rank_bm25(std::span<const TermId> query, const RetrievalContext& ctx, const RankLimits& limits) {
    limits.validate();
    const auto p = index::bm25_pipeline(query, ctx.index, ctx.corpus, ctx.bm25, limits.docs, limits.sentences);
    Ranking r;
    for (const auto& d : p.docs) r.docs.push_back({d.doc, d.bm25});
    for (const auto& s : p.sentences) r.sentences.push_back({s.ref, s.bm25});
    return r;
}

Ranking rank_pipeline(const Model& doc_model, const Model& sentence_model, const PreparedQuery& q,
                      const text::TermTable& table, const RankLimits& limits) {
    limits.validate();
    auto scores = score_docs(doc_model, q, table);
    const auto top = top_candidates(q, scores.doc, limits.docs);
    const auto sent = score_sentences(sentence_model, q, table, &top);
    scores.sentence = sent.sentence;
    return rank_from_scores(q, scores, limits);
}

Ranking rank_joint(const Model& m, const PreparedQuery& q, const text::TermTable& table, const RankLimits& limits) {
    return rank_from_scores(q, score_joint(m, q, table), limits);
}

Ranking rank_sentence_pdrmm(const Model& m, const PreparedQuery& q, const text::TermTable& table,
                            const RankLimits& limits) {
    return rank_from_scores(q, score_sentences(m, q, table), limits);
}

} // namespace jrank::model
