#include "jrank/model/features.hpp"

#include "jrank/error.hpp"
#include "jrank/text/lexical.hpp"

#include <algorithm>
#include <cmath>
#include <thread>

namespace jrank::model {

DocExtra doc_extra_features(std::span<const TermId> query, std::span<const TermId> doc, double bm25_z,
                            const text::TermTable& table) {
    const auto overlap = text::lexical_overlap(query, doc, table);
    const double distinct = static_cast<double>(text::distinct_terms(query).size());
    const double bigram_count = static_cast<double>(text::bigrams(query).size());
    return {bm25_z, distinct > 0 ? overlap.shared_tokens / distinct : 0.0, overlap.idf_share,
            bigram_count > 0 ? overlap.shared_bigrams / bigram_count : 0.0};
}

SentenceExtra sentence_extra_features(std::span<const TermId> query, std::size_t query_chars,
                                      const data::Sentence& sentence, double sentence_bm25, double doc_bm25,
                                      const text::TermTable& table) {
    const auto o = text::lexical_overlap(query, sentence.terms, table);
    return {static_cast<double>(query_chars),
            static_cast<double>(sentence.char_length),
            o.shared_tokens,
            o.shared_tokens_no_stop,
            o.shared_idf,
            o.shared_idf_no_stop,
            o.idf_share,
            o.shared_bigrams,
            sentence_bm25,
            doc_bm25};
}

ad::Array exact_match(std::span<const TermId> query, std::span<const TermId> text) {
    ad::Array out(query.size(), text.size());
    for (std::size_t i = 0; i < query.size(); ++i)
        for (std::size_t j = 0; j < text.size(); ++j) out(i, j) = query[i] == text[j] ? 1.0 : 0.0;
    return out;
}

ad::Array pool_rows(const ad::Array& sim, std::size_t k) {
    if (sim.cols() == 0) throw ShapeError("pool_rows: empty rows " + sim.shape_string());
    const std::size_t kk = std::clamp<std::size_t>(k, 1, sim.cols());
    ad::Array out(sim.rows(), 3);
    std::vector<double> row(sim.cols());
    for (std::size_t i = 0; i < sim.rows(); ++i) {
        double sum = 0.0;
        for (std::size_t j = 0; j < sim.cols(); ++j) {
            row[j] = sim(i, j);
            sum += row[j];
        }
        std::partial_sort(row.begin(), row.begin() + static_cast<std::ptrdiff_t>(kk), row.end(),
                          std::greater<>());
        double top = 0.0;
        for (std::size_t j = 0; j < kk; ++j) top += row[j];
        out(i, 0) = row[0];
        out(i, 1) = sum / static_cast<double>(sim.cols());
        out(i, 2) = top / static_cast<double>(kk);
    }
    return out;
}

namespace {

ad::Array cosine(const ad::Array& a, const ad::Array& b) {
    auto norms = [](const ad::Array& x) {
        std::vector<double> n(x.rows());
        for (std::size_t i = 0; i < x.rows(); ++i) {
            double s = 0.0;
            for (double v : x.row_span(i)) s += v * v;
            n[i] = std::sqrt(s);
        }
        return n;
    };
    const auto na = norms(a), nb = norms(b);
    ad::Array out(a.rows(), b.rows());
    for (std::size_t i = 0; i < a.rows(); ++i) {
        if (na[i] < 1e-12) continue;
        const auto ra = a.row_span(i);
        for (std::size_t j = 0; j < b.rows(); ++j) {
            if (nb[j] < 1e-12) continue;
            const auto rb = b.row_span(j);
            double s = 0.0;
            for (std::size_t c = 0; c < ra.size(); ++c) s += ra[c] * rb[c];
            out(i, j) = s / (na[i] * nb[j]);
        }
    }
    return out;
}

} // namespace

ad::Array static_pooled(const ad::Array& query_static, std::span<const TermId> query_terms,
                        const ad::Array& text_static, std::span<const TermId> text_terms, std::size_t k) {
    const auto s2 = pool_rows(cosine(query_static, text_static), k);
    const auto s3 = pool_rows(exact_match(query_terms, text_terms), k);
    ad::Array out(s2.rows(), 6);
    for (std::size_t i = 0; i < s2.rows(); ++i)
        for (std::size_t c = 0; c < 3; ++c) {
            out(i, c) = s2(i, c);
            out(i, 3 + c) = s3(i, c);
        }
    return out;
}

QueryInput make_query_input(std::span<const TermId> terms, std::size_t char_length, const text::TermTable& table) {
    QueryInput q;
    q.terms.assign(terms.begin(), terms.end());
    if (q.terms.empty()) q.terms.push_back(text::kUnknownTerm);
    q.char_length = char_length;
    q.embeddings = table.embed(q.terms);
    q.idf = ad::Array(q.terms.size(), 1);
    for (std::size_t i = 0; i < q.terms.size(); ++i) q.idf(i, 0) = table.idf(q.terms[i]);
    return q;
}

PreparedQuery prepare_query(const data::Question& question, const RetrievalContext& ctx, std::size_t top_k) {
    if (top_k == 0) throw ArgumentError("prepare_query: k must be at least 1");
    PreparedQuery pq;
    pq.id = question.id;
    pq.top_k = top_k;
    pq.gold_docs = question.gold_docs;
    pq.gold_snippets = question.gold_snippets;
    pq.query = make_query_input(question.terms, question.char_length, ctx.table);
    const auto& q = pq.query;

    const auto top = ctx.index.retrieve(question.terms, ctx.bm25, ctx.top_n);
    std::vector<DocNo> docs;
    docs.reserve(top.size());
    for (const auto& c : top) docs.push_back(c.doc);
    // Collection statistics of every sentence of the candidates.
    const index::SentenceCollection sentences(docs, ctx.corpus);
    const auto sentence_bm25 = sentences.score_all(question.terms, ctx.bm25);
    std::size_t next = 0;

    for (const auto& c : top) {
        const auto& doc = ctx.corpus[c.doc];
        const std::size_t first = next;
        next += doc.sentences.size();
        if (doc.terms.empty()) continue;
        CandidateInput cand;
        cand.doc = c.doc;
        cand.bm25 = c.bm25;
        cand.bm25_z = c.bm25_z;
        cand.gold = question.gold_docs.count(c.doc) != 0;
        cand.text.terms = doc.terms;
        cand.text.static_pooled =
            static_pooled(q.embeddings, q.terms, ctx.table.embed(doc.terms), doc.terms, top_k);
        cand.extra = doc_extra_features(q.terms, doc.terms, c.bm25_z, ctx.table);
        for (std::uint32_t s = 0; s < doc.sentences.size(); ++s) {
            const auto& sent = doc.sentences[s];
            if (sent.terms.empty()) continue;
            SentenceInput si;
            si.index = s;
            si.text.terms = sent.terms;
            si.text.static_pooled =
                static_pooled(q.embeddings, q.terms, ctx.table.embed(sent.terms), sent.terms, top_k);
            si.extra = sentence_extra_features(q.terms, q.char_length, sent, sentence_bm25[first + s], c.bm25,
                                               ctx.table);
            si.gold = question.gold_snippets.count({c.doc, s}) != 0;
            cand.sentences.push_back(std::move(si));
        }
        pq.candidates.push_back(std::move(cand));
    }
    return pq;
}

std::vector<PreparedQuery> prepare_queries(std::span<const data::Question> questions, const RetrievalContext& ctx,
                                           std::size_t top_k, std::size_t jobs) {
    std::vector<PreparedQuery> out(questions.size());
    jobs = std::clamp<std::size_t>(jobs, 1, std::max<std::size_t>(questions.size(), 1));
    if (jobs == 1) {
        for (std::size_t i = 0; i < questions.size(); ++i) out[i] = prepare_query(questions[i], ctx, top_k);
        return out;
    }
    std::vector<std::exception_ptr> errors(jobs);
    std::vector<std::thread> workers;
    for (std::size_t w = 0; w < jobs; ++w)
        workers.emplace_back([&, w] {
            try {
                for (std::size_t i = w; i < questions.size(); i += jobs) out[i] = prepare_query(questions[i], ctx, top_k);
            } catch (...) {
                errors[w] = std::current_exception();
            }
        });
    for (auto& t : workers) t.join();
    for (auto& e : errors)
        if (e) std::rethrow_exception(e);
    return out;
}

void FeatureNorm::fit(std::span<const SentenceExtra> samples) {
    mean.assign(kSentenceExtraCount, 0.0);
    stddev.assign(kSentenceExtraCount, 1.0);
    if (samples.empty()) return;
    const double n = static_cast<double>(samples.size());
    for (std::size_t f = 0; f < kSentenceExtraCount; ++f) {
        if (f == kIdfShareFeature) continue;
        double m = 0.0;
        for (const auto& s : samples) m += s[f];
        m /= n;
        double v = 0.0;
        for (const auto& s : samples) v += (s[f] - m) * (s[f] - m);
        const double sd = std::sqrt(v / n);
        mean[f] = m;
        stddev[f] = sd < 1e-12 ? 1.0 : sd;
    }
}

ad::Array FeatureNorm::apply(const SentenceExtra& raw) const {
    ad::Array out(1, kSentenceExtraCount);
    for (std::size_t f = 0; f < kSentenceExtraCount; ++f)
        out(0, f) = fitted() ? (raw[f] - mean[f]) / stddev[f] : raw[f];
    return out;
}

} // namespace jrank::model
