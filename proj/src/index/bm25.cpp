#include "jrank/index/bm25.hpp"

#include "jrank/binio.hpp"
#include "jrank/error.hpp"
#include "jrank/text/lexical.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <numeric>
#include <unordered_set>

namespace jrank::index {

void Bm25Params::validate() const {
    if (!(k1 > 0.0)) throw ArgumentError("BM25 k1 must be positive");
    if (!(b >= 0.0 && b <= 1.0)) throw ArgumentError("BM25 b must lie in [0, 1]");
}

std::vector<double> z_normalize(std::span<const double> scores) {
    std::vector<double> out(scores.size(), 0.0);
    if (scores.empty()) return out;
    double mean = 0.0;
    for (double s : scores) mean += s;
    mean /= static_cast<double>(scores.size());
    double var = 0.0;
    for (double s : scores) var += (s - mean) * (s - mean);
    const double sd = std::sqrt(var / static_cast<double>(scores.size()));
    if (sd < 1e-12) return out;
    for (std::size_t i = 0; i < scores.size(); ++i) out[i] = (scores[i] - mean) / sd;
    return out;
}

void InvertedIndex::finish() {
    const double total = std::accumulate(lengths_.begin(), lengths_.end(), 0.0);
    avgdl_ = lengths_.empty() ? 0.0 : total / static_cast<double>(lengths_.size());
}

InvertedIndex InvertedIndex::build(std::span<const std::span<const TermId>> documents) {
    InvertedIndex idx;
    idx.lengths_.reserve(documents.size());
    std::unordered_map<TermId, std::uint32_t> tf;
    for (std::size_t d = 0; d < documents.size(); ++d) {
        tf.clear();
        for (TermId t : documents[d]) ++tf[t];
        // Sorted per document so postings append in doc order deterministically.
        std::vector<std::pair<TermId, std::uint32_t>> sorted(tf.begin(), tf.end());
        std::sort(sorted.begin(), sorted.end());
        for (const auto& [t, f] : sorted) idx.postings_[t].push_back({static_cast<DocNo>(d), f});
        idx.lengths_.push_back(static_cast<std::uint32_t>(documents[d].size()));
    }
    idx.finish();
    return idx;
}

InvertedIndex InvertedIndex::build(std::span<const std::string> ids,
                                   std::span<const std::vector<TermId>> documents) {
    if (ids.size() != documents.size()) throw ArgumentError("InvertedIndex: ids and documents differ in count");
    std::unordered_set<std::string_view> seen;
    for (const auto& id : ids)
        if (!seen.insert(id).second) throw DataError("duplicate document id: " + id);
    std::vector<std::span<const TermId>> views(documents.begin(), documents.end());
    InvertedIndex idx = build(views);
    idx.ids_.assign(ids.begin(), ids.end());
    return idx;
}

std::uint32_t InvertedIndex::length(DocNo doc) const {
    if (doc >= lengths_.size()) throw ArgumentError("unknown document number " + std::to_string(doc));
    return lengths_[doc];
}

const std::string& InvertedIndex::doc_id(DocNo doc) const {
    if (doc >= ids_.size()) throw ArgumentError("no id for document number " + std::to_string(doc));
    return ids_[doc];
}

const std::vector<Posting>& InvertedIndex::postings(TermId term) const {
    static const std::vector<Posting> none;
    auto it = postings_.find(term);
    return it == postings_.end() ? none : it->second;
}

double InvertedIndex::idf(TermId term) const { return text::smoothed_idf(df(term), document_count()); }

std::vector<TermId> InvertedIndex::terms() const {
    std::vector<TermId> out;
    out.reserve(postings_.size());
    for (const auto& [t, p] : postings_) out.push_back(t);
    std::sort(out.begin(), out.end());
    return out;
}

double InvertedIndex::term_weight(TermId term, std::uint32_t tf, std::uint32_t len,
                                  const Bm25Params& p) const {
    const double f = static_cast<double>(tf);
    const double norm = avgdl_ > 0.0 ? static_cast<double>(len) / avgdl_ : 1.0;
    return idf(term) * f * (p.k1 + 1.0) / (f + p.k1 * (1.0 - p.b + p.b * norm));
}

double InvertedIndex::score(std::span<const TermId> query, DocNo doc, const Bm25Params& params) const {
    const std::uint32_t len = length(doc);
    double s = 0.0;
    for (TermId t : text::distinct_terms(query)) {
        const auto& plist = postings(t);
        auto it = std::lower_bound(plist.begin(), plist.end(), doc,
                                   [](const Posting& p, DocNo d) { return p.doc < d; });
        if (it != plist.end() && it->doc == doc) s += term_weight(t, it->tf, len, params);
    }
    return s;
}

std::vector<double> InvertedIndex::score_all(std::span<const TermId> query, const Bm25Params& params) const {
    std::vector<double> scores(document_count(), 0.0);
    for (TermId t : text::distinct_terms(query))
        for (const Posting& p : postings(t)) scores[p.doc] += term_weight(t, p.tf, lengths_[p.doc], params);
    return scores;
}

std::vector<ScoredCandidate> InvertedIndex::retrieve(std::span<const TermId> query,
                                                     const Bm25Params& params, std::size_t n) const {
    if (n == 0) throw ArgumentError("retrieve: N must be at least 1");
    const auto scores = score_all(query, params);
    std::vector<DocNo> order(scores.size());
    std::iota(order.begin(), order.end(), DocNo{0});
    const std::size_t k = std::min(n, order.size());
    std::partial_sort(order.begin(), order.begin() + static_cast<std::ptrdiff_t>(k), order.end(),
                      [&](DocNo a, DocNo b) { return scores[a] > scores[b] || (scores[a] == scores[b] && a < b); });
    std::vector<ScoredCandidate> out;
    out.reserve(k);
    std::vector<double> raw;
    raw.reserve(k);
    for (std::size_t i = 0; i < k; ++i) {
        out.push_back({order[i], scores[order[i]], 0.0});
        raw.push_back(scores[order[i]]);
    }
    const auto z = z_normalize(raw);
    for (std::size_t i = 0; i < k; ++i) out[i].bm25_z = z[i];
    return out;
}

namespace {
constexpr char kIndexMagic[8] = {'J', 'R', 'N', 'K', 'I', 'D', 'X', '\0'};
}

void InvertedIndex::save(const std::string& path, const text::TermTable& table,
                         const Bm25Params& params) const {
    std::ofstream out(path, std::ios::binary);
    if (!out) throw IoError("cannot write index file: " + path);
    out.write(kIndexMagic, sizeof kIndexMagic);
    binio::put<std::uint32_t>(out, kFormatVersion);
    binio::put<std::uint64_t>(out, document_count());
    binio::put<double>(out, avgdl_);
    binio::put<double>(out, params.k1);
    binio::put<double>(out, params.b);
    binio::put<std::uint8_t>(out, ids_.empty() ? 0 : 1);
    for (std::size_t d = 0; d < lengths_.size(); ++d) {
        if (!ids_.empty()) binio::put_string(out, ids_[d]);
        binio::put<std::uint32_t>(out, lengths_[d]);
    }
    // Terms in lexicographic order of their strings, for a table-independent file.
    std::vector<std::pair<std::string, TermId>> terms;
    for (const auto& [t, p] : postings_) terms.emplace_back(table.term(t), t);
    std::sort(terms.begin(), terms.end());
    binio::put<std::uint64_t>(out, terms.size());
    for (const auto& [s, t] : terms) {
        binio::put_string(out, s);
        const auto& plist = postings_.at(t);
        binio::put<std::uint32_t>(out, static_cast<std::uint32_t>(plist.size()));
        for (const Posting& p : plist) {
            binio::put<std::uint32_t>(out, p.doc);
            binio::put<std::uint32_t>(out, p.tf);
        }
    }
    if (!out) throw IoError("failed writing index file: " + path);
}

InvertedIndex InvertedIndex::load(const std::string& path, const text::TermTable& table, Bm25Params* params) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw IoError("cannot open index file: " + path);
    char magic[8];
    if (!in.read(magic, sizeof magic) || std::memcmp(magic, kIndexMagic, sizeof magic) != 0)
        throw FormatError(path, 0, "not an index file");
    const auto version = binio::get<std::uint32_t>(in, path);
    if (version != kFormatVersion)
        throw FormatError(path, 0, "index format version " + std::to_string(version) + ", expected " +
                                       std::to_string(kFormatVersion));
    InvertedIndex idx;
    const auto n = binio::get<std::uint64_t>(in, path);
    idx.avgdl_ = binio::get<double>(in, path);
    Bm25Params stored;
    stored.k1 = binio::get<double>(in, path);
    stored.b = binio::get<double>(in, path);
    if (params) *params = stored;
    const bool named = binio::get<std::uint8_t>(in, path) != 0;
    for (std::uint64_t d = 0; d < n; ++d) {
        if (named) idx.ids_.push_back(binio::get_string(in, path));
        idx.lengths_.push_back(binio::get<std::uint32_t>(in, path));
    }
    const auto n_terms = binio::get<std::uint64_t>(in, path);
    for (std::uint64_t i = 0; i < n_terms; ++i) {
        const std::string term = binio::get_string(in, path);
        const auto count = binio::get<std::uint32_t>(in, path);
        std::vector<Posting> plist(count);
        for (auto& p : plist) {
            p.doc = binio::get<std::uint32_t>(in, path);
            p.tf = binio::get<std::uint32_t>(in, path);
            if (p.doc >= n) throw FormatError(path, 0, "posting refers to document " + std::to_string(p.doc));
        }
        const TermId t = table.id(term);
        if (t != text::kUnknownTerm || term == text::kUnknownToken) idx.postings_.emplace(t, std::move(plist));
    }
    return idx;
}

SentenceCollection::SentenceCollection(std::span<const DocNo> docs, const SentenceSource& source) {
    std::vector<std::span<const TermId>> views;
    for (DocNo d : docs) {
        const std::size_t k = source.sentence_count(d);
        for (std::uint32_t s = 0; s < k; ++s) {
            refs_.push_back({d, s});
            views.push_back(source.sentence_terms(d, s));
        }
    }
    index_ = InvertedIndex::build(views);
}

std::vector<ScoredSentence> top_sentences(std::vector<ScoredSentence> all, std::size_t n) {
    const std::size_t k = std::min(n, all.size());
    std::partial_sort(all.begin(), all.begin() + static_cast<std::ptrdiff_t>(k), all.end(),
                      [](const ScoredSentence& a, const ScoredSentence& b) {
                          return a.bm25 > b.bm25 || (a.bm25 == b.bm25 && a.ref < b.ref);
                      });
    all.resize(k);
    return all;
}

PipelineResult bm25_pipeline(std::span<const TermId> query, const InvertedIndex& index,
                             const SentenceSource& sentences, const Bm25Params& params,
                             std::size_t n_docs, std::size_t n_sentences) {
    if (n_docs == 0 || n_sentences == 0) throw ArgumentError("bm25_pipeline: N_d and N_s must be at least 1");
    PipelineResult r;
    if (index.document_count() == 0) return r;
    r.docs = index.retrieve(query, params, n_docs);
    std::vector<DocNo> docs;
    for (const auto& c : r.docs) docs.push_back(c.doc);
    std::sort(docs.begin(), docs.end());
    const SentenceCollection collection(docs, sentences);
    const auto scores = collection.score_all(query, params);
    std::vector<ScoredSentence> all;
    all.reserve(scores.size());
    for (std::size_t i = 0; i < scores.size(); ++i) all.push_back({collection.refs()[i], scores[i]});
    r.sentences = top_sentences(std::move(all), n_sentences);
    return r;
}

} // namespace jrank::index
