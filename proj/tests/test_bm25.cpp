#include "jrank/error.hpp"
#include "jrank/index/bm25.hpp"
#include "jrank/rng.hpp"

#include "support.hpp"

#include <doctest.h>

#include <algorithm>
#include <cmath>
#include <map>
#include <set>

using namespace jrank;
using namespace jrank::index;

namespace {

// Exhaustive BM25 straight from the raw term lists.
struct BruteForce {
    const std::vector<std::vector<TermId>>& docs;
    Bm25Params p;

    double score(const std::vector<TermId>& query, std::size_t d) const {
        double total_len = 0.0;
        for (const auto& doc : docs) total_len += static_cast<double>(doc.size());
        const double avgdl = total_len / static_cast<double>(docs.size());
        const double n = static_cast<double>(docs.size());
        std::set<TermId> seen;
        double s = 0.0;
        for (TermId t : query) {
            if (!seen.insert(t).second) continue;
            double df = 0.0;
            for (const auto& doc : docs) df += std::count(doc.begin(), doc.end(), t) > 0 ? 1.0 : 0.0;
            const double tf = static_cast<double>(std::count(docs[d].begin(), docs[d].end(), t));
            if (tf == 0.0) continue;
            const double idf = std::log((n - df + 0.5) / (df + 0.5) + 1.0);
            const double len = static_cast<double>(docs[d].size());
            s += idf * tf * (p.k1 + 1.0) / (tf + p.k1 * (1.0 - p.b + p.b * len / avgdl));
        }
        return s;
    }
};

std::vector<std::vector<TermId>> random_docs(std::size_t n, std::size_t vocab, Rng& rng) {
    std::vector<std::vector<TermId>> docs(n);
    for (auto& d : docs) {
        const auto len = rng.between(1, 30);
        for (std::int64_t i = 0; i < len; ++i) d.push_back(static_cast<TermId>(1 + rng.below(vocab)));
    }
    return docs;
}

InvertedIndex build(const std::vector<std::vector<TermId>>& docs) {
    std::vector<std::span<const TermId>> views(docs.begin(), docs.end());
    return InvertedIndex::build(views);
}

} // namespace

TEST_CASE("bm25 of a hand-made collection") {
    // Three documents of lengths 2, 4 and 3; avgdl = 3.
    const std::vector<std::vector<TermId>> docs = {{1, 2}, {1, 1, 3, 4}, {2, 3, 5}};
    const auto idx = build(docs);
    const Bm25Params p{1.2, 0.75};
    CHECK(idx.document_count() == 3);
    CHECK(idx.average_length() == doctest::Approx(3.0));
    CHECK(idx.df(1) == 2);
    // Term 1 in doc 1: tf 2, len 4.
    const double idf1 = std::log((3 - 2 + 0.5) / (2 + 0.5) + 1.0);
    const double w = idf1 * 2 * 2.2 / (2 + 1.2 * (0.25 + 0.75 * 4.0 / 3.0));
    CHECK(idx.score(std::vector<TermId>{1}, 1, p) == doctest::Approx(w));
    // Repeated query terms count once.
    CHECK(idx.score(std::vector<TermId>{1, 1}, 1, p) == doctest::Approx(w));
    // Absent terms score nothing; unknown doc is an error.
    CHECK(idx.score(std::vector<TermId>{9}, 0, p) == 0.0);
    CHECK_THROWS_AS(idx.score(std::vector<TermId>{1}, 7, p), ArgumentError);
}

TEST_CASE("index scores equal brute force on random collections") {
    Rng rng(11);
    const auto docs = random_docs(300, 60, rng);
    const auto idx = build(docs);
    const Bm25Params p;
    const BruteForce oracle{docs, p};
    for (int q = 0; q < 20; ++q) {
        std::vector<TermId> query;
        for (int i = 0; i < 4; ++i) query.push_back(static_cast<TermId>(1 + rng.below(70)));
        const auto all = idx.score_all(query, p);
        for (std::size_t d = 0; d < docs.size(); ++d) CHECK(std::abs(all[d] - oracle.score(query, d)) < 1e-9);

        const auto top = idx.retrieve(query, p, 25);
        std::vector<std::size_t> order(docs.size());
        for (std::size_t i = 0; i < order.size(); ++i) order[i] = i;
        std::stable_sort(order.begin(), order.end(),
                         [&](std::size_t a, std::size_t b) { return oracle.score(query, a) > oracle.score(query, b); });
        REQUIRE(top.size() == 25);
        for (std::size_t i = 0; i < top.size(); ++i) CHECK(top[i].doc == order[i]);
    }
}

TEST_CASE("retrieve ties break by document number and pads with zero scores") {
    const std::vector<std::vector<TermId>> docs = {{5}, {1}, {1}, {2}};
    const auto idx = build(docs);
    const auto top = idx.retrieve(std::vector<TermId>{1}, {}, 4);
    REQUIRE(top.size() == 4);
    CHECK(top[0].doc == 1);
    CHECK(top[1].doc == 2);
    CHECK(top[2].doc == 0);
    CHECK(top[3].doc == 3);
    CHECK(top[3].bm25 == 0.0);
    CHECK(idx.retrieve(std::vector<TermId>{1}, {}, 100).size() == 4);
    CHECK_THROWS_AS(idx.retrieve(std::vector<TermId>{1}, {}, 0), ArgumentError);
}

TEST_CASE("z-normalization of retrieved scores") {
    const auto z = z_normalize(std::vector<double>{1.0, 2.0, 3.0});
    CHECK(z[0] == doctest::Approx(-std::sqrt(1.5)));
    CHECK(z[1] == doctest::Approx(0.0));
    const auto flat = z_normalize(std::vector<double>{2.0, 2.0});
    CHECK(flat[0] == 0.0);
    CHECK(flat[1] == 0.0);
    CHECK(z_normalize(std::vector<double>{}).empty());
}

TEST_CASE("parameter validation") {
    CHECK_THROWS_AS((Bm25Params{0.0, 0.5}.validate()), ArgumentError);
    CHECK_THROWS_AS((Bm25Params{1.0, 1.5}.validate()), ArgumentError);
    CHECK_NOTHROW((Bm25Params{0.9, 0.4}.validate()));
}

TEST_CASE("named documents reject duplicates") {
    const std::vector<std::string> ids = {"a", "b", "a"};
    const std::vector<std::vector<TermId>> docs = {{1}, {2}, {3}};
    CHECK_THROWS_AS(InvertedIndex::build(ids, docs), DataError);
}

TEST_CASE("save and load round-trip") {
    const std::vector<std::vector<std::string>> tokens = {{"red", "fox"}, {"lazy", "dog", "fox"}, {"red"}};
    const auto table = text::TermTable::build(tokens);
    std::vector<std::vector<TermId>> docs;
    for (const auto& t : tokens) docs.push_back(table.encode(t));
    const std::vector<std::string> ids = {"d1", "d2", "d3"};
    const auto idx = InvertedIndex::build(ids, docs);

    testing::TempDir dir;
    const Bm25Params p{1.1, 0.3};
    idx.save(dir.file("i.bin"), table, p);
    Bm25Params loaded_p;
    const auto back = InvertedIndex::load(dir.file("i.bin"), table, &loaded_p);
    CHECK(back == idx);
    CHECK(loaded_p.k1 == 1.1);
    CHECK(loaded_p.b == 0.3);
    CHECK(back.doc_id(1) == "d2");

    // Truncated and foreign files fail cleanly.
    const auto bytes = testing::read_bytes(dir.file("i.bin"));
    testing::write_text(dir.file("short.bin"), bytes.substr(0, bytes.size() / 2));
    CHECK_THROWS_AS(InvertedIndex::load(dir.file("short.bin"), table), FormatError);
    testing::write_text(dir.file("junk.bin"), "not an index");
    CHECK_THROWS_AS(InvertedIndex::load(dir.file("junk.bin"), table), FormatError);
    CHECK_THROWS_AS(InvertedIndex::load(dir.file("missing.bin"), table), IoError);
}

namespace {

struct FakeSentences : SentenceSource {
    std::vector<std::vector<std::vector<TermId>>> docs;
    std::size_t sentence_count(DocNo d) const override { return docs.at(d).size(); }
    std::span<const TermId> sentence_terms(DocNo d, std::uint32_t s) const override { return docs.at(d).at(s); }
};

} // namespace

TEST_CASE("bm25 pipeline returns sentences of returned documents only") {
    Rng rng(12);
    FakeSentences src;
    std::vector<std::vector<TermId>> flat;
    for (int d = 0; d < 40; ++d) {
        std::vector<std::vector<TermId>> sents(static_cast<std::size_t>(rng.between(1, 4)));
        std::vector<TermId> all;
        for (auto& s : sents) {
            for (int i = 0; i < 6; ++i) s.push_back(static_cast<TermId>(1 + rng.below(20)));
            all.insert(all.end(), s.begin(), s.end());
        }
        src.docs.push_back(sents);
        flat.push_back(all);
    }
    const auto idx = build(flat);
    for (int q = 0; q < 10; ++q) {
        const std::vector<TermId> query = {static_cast<TermId>(1 + rng.below(20)), static_cast<TermId>(1 + rng.below(20))};
        const auto r = bm25_pipeline(query, idx, src, {}, 5, 8);
        CHECK(r.docs.size() == 5);
        CHECK(r.sentences.size() <= 8);
        std::set<DocNo> docs;
        for (const auto& d : r.docs) docs.insert(d.doc);
        for (const auto& s : r.sentences) CHECK(docs.count(s.ref.doc));
        for (std::size_t i = 1; i < r.sentences.size(); ++i) CHECK(r.sentences[i - 1].bm25 >= r.sentences[i].bm25);

        // Sentence scores come from an index over exactly those sentences.
        std::vector<DocNo> top;
        for (const auto& d : r.docs) top.push_back(d.doc);
        const SentenceCollection coll(top, src);
        const auto scores = coll.score_all(query, {});
        for (const auto& s : r.sentences) {
            const auto it = std::find(coll.refs().begin(), coll.refs().end(), s.ref);
            REQUIRE(it != coll.refs().end());
            CHECK(scores[static_cast<std::size_t>(it - coll.refs().begin())] == s.bm25);
        }
    }
}

TEST_CASE("top_sentences orders by score then reference") {
    std::vector<ScoredSentence> all = {{{2, 0}, 1.0}, {{1, 3}, 2.0}, {{1, 1}, 1.0}, {{0, 0}, 0.5}};
    const auto top = top_sentences(all, 3);
    REQUIRE(top.size() == 3);
    CHECK(top[0].ref == SentenceRef{1, 3});
    CHECK(top[1].ref == SentenceRef{1, 1});
    CHECK(top[2].ref == SentenceRef{2, 0});
}
