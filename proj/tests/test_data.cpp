#include "jrank/data/ingest.hpp"
#include "jrank/data/nq.hpp"
#include "jrank/data/synthetic.hpp"
#include "jrank/error.hpp"
#include "jrank/eval/metrics.hpp"
#include "jrank/model/rank.hpp"
#include "jrank/rng.hpp"

#include "support.hpp"

#include <doctest.h>

#include <algorithm>
#include <set>

using namespace jrank;
using namespace jrank::data;

namespace {

Corpus two_docs() {
    return Corpus::from_records({{"d1", "A title", "First sentence here. Second one follows.", std::nullopt},
                                 {"d2", "", "Only body. With two sentences.", std::nullopt}});
}

std::size_t offset_of(const Corpus& c, const std::string& id, const std::string& needle) {
    return c[*c.find(id)].text.find(needle);
}

} // namespace

TEST_CASE("corpus documents put the title first") {
    const auto c = two_docs();
    REQUIRE(c.size() == 2);
    const auto& d1 = c[0];
    CHECK(d1.text == "A title First sentence here. Second one follows.");
    REQUIRE(d1.sentences.size() == 3);
    CHECK(d1.sentences[0].tokens == std::vector<std::string>{"a", "title"});
    CHECK(d1.sentences[2].tokens == std::vector<std::string>{"second", "one", "follows"});
    CHECK(c[1].sentences.size() == 2);
    CHECK(c.find("d2") == DocNo{1});
    CHECK_FALSE(c.find("d3"));
}

TEST_CASE("corpus errors") {
    CHECK_THROWS_AS(Corpus::from_records({{"a", "", "x", std::nullopt}, {"a", "", "y", std::nullopt}}), DataError);
    CHECK_THROWS_AS(Corpus::from_records({{"", "", "x", std::nullopt}}), DataError);
    CHECK_THROWS_AS(Corpus::from_records({{"a", "", "", std::nullopt}}), DataError);
    CHECK_THROWS_AS(Corpus::from_records({{"a", "", "One. Two.", std::vector<std::string>{"Three."}}}), FormatError);
}

TEST_CASE("pre-split sentences are used as given") {
    const auto c = Corpus::from_records({{"a", "", "x. y. Z w.", std::vector<std::string>{"x. y.", "Z w."}}});
    REQUIRE(c[0].sentences.size() == 2);
    CHECK(c[0].sentences[0].tokens == std::vector<std::string>{"x", "y"});
}

TEST_CASE("gold spans map to overlapping sentences") {
    const auto c = two_docs();
    const std::string s1 = "First sentence here.";
    const std::size_t b1 = offset_of(c, "d1", s1);

    SUBCASE("span exactly one sentence") {
        const auto q = resolve_questions({{"q", "text", {"d1"}, {}, {{"d1", b1, b1 + s1.size()}}}}, c);
        CHECK(q[0].gold_snippets == std::set<SentenceRef>{{0, 1}});
    }
    SUBCASE("span straddling two sentences") {
        const std::size_t b = offset_of(c, "d1", "here. Second");
        const auto q = resolve_questions({{"q", "text", {"d1"}, {}, {{"d1", b, b + 12}}}}, c);
        CHECK(q[0].gold_snippets == std::set<SentenceRef>{{0, 1}, {0, 2}});
    }
    SUBCASE("a single character of overlap is enough") {
        const std::size_t b = offset_of(c, "d1", "Second");
        const auto q = resolve_questions({{"q", "text", {"d1"}, {}, {{"d1", b, b + 1}}}}, c);
        CHECK(q[0].gold_snippets == std::set<SentenceRef>{{0, 2}});
    }
    SUBCASE("span in the whitespace between sentences marks nothing") {
        const std::size_t b = b1 + s1.size();
        const auto q = resolve_questions({{"q", "text", {"d1"}, {}, {{"d1", b, b + 1}}}}, c);
        CHECK(q[0].gold_snippets.empty());
    }
}

TEST_CASE("question resolution errors") {
    const auto c = two_docs();
    CHECK_THROWS_AS(resolve_questions({{"q", "t", {"nope"}, {}, {}}}, c), DataError);
    CHECK_THROWS_AS(resolve_questions({{"q", "t", {"d1"}, {{"d2", 0}}, {}}}, c), DataError);
    CHECK_THROWS_AS(resolve_questions({{"q", "t", {"d1"}, {{"d1", 9}}, {}}}, c), DataError);
    CHECK_THROWS_AS(resolve_questions({{"q", "t", {"d1"}, {}, {{"d1", 4, 4}}}}, c), DataError);
    CHECK_THROWS_AS(resolve_questions({{"q", "t", {}, {}, {}}, {"q", "u", {}, {}, {}}}, c), DataError);
}

TEST_CASE("ingest reports the offending line") {
    testing::TempDir dir;
    testing::write_text(dir.file("c.jsonl"), "{\"id\":\"d1\",\"body\":\"Some text.\"}\n\n{\"id\":\"d2\"}\n");
    try {
        read_corpus(dir.file("c.jsonl"));
        FAIL("expected FormatError");
    } catch (const FormatError& e) {
        CHECK(e.line() == 3);
    }
    testing::write_text(dir.file("c2.jsonl"), "{\"id\":\"d1\",\"body\":\"Some text.\"}\nnot json\n");
    try {
        read_corpus(dir.file("c2.jsonl"));
        FAIL("expected FormatError");
    } catch (const FormatError& e) {
        CHECK(e.line() == 2);
    }

    testing::write_text(dir.file("ok.jsonl"), "{\"id\":\"d1\",\"body\":\"Some text.\"}\n");
    testing::write_text(dir.file("q.jsonl"),
                        "{\"id\":\"q1\",\"text\":\"some\",\"gold_docs\":[\"d1\"],\"gold_snippets\":[]}\n"
                        "{\"id\":\"q2\",\"text\":\"x\",\"gold_docs\":[\"d9\"],\"gold_snippets\":[]}\n");
    try {
        ingest(dir.file("ok.jsonl"), dir.file("q.jsonl"));
        FAIL("expected DataError");
    } catch (const DataError& e) {
        CHECK(std::string(e.what()).find(":2:") != std::string::npos);
    }
    CHECK_THROWS_AS(read_corpus(dir.file("none.jsonl")), IoError);
}

TEST_CASE("record files round-trip") {
    testing::TempDir dir;
    const std::vector<CorpusRecord> corpus = {{"d1", "T", "Body one. Body two.", std::nullopt},
                                              {"d2", "", "Other.", std::vector<std::string>{"Other."}}};
    const std::vector<QuestionRecord> questions = {{"q1", "what body", {"d1"}, {{"d1", 1}}, {{"d1", 2, 6}}}};
    write_corpus(dir.file("c.jsonl"), corpus);
    write_questions(dir.file("q.jsonl"), questions);
    SplitSpec split;
    split.train = {"q1"};
    split.seed = 4;
    write_split(dir.file("s.json"), split);

    const auto c = read_corpus(dir.file("c.jsonl"));
    REQUIRE(c.records.size() == 2);
    CHECK(c.records[0].title == "T");
    CHECK(c.records[1].sentences.has_value());
    const auto q = read_questions(dir.file("q.jsonl"));
    CHECK(q.records[0].gold_sentences[0].sentence == 1);
    CHECK(q.records[0].gold_spans[0].end == 6);
    const auto s = read_split(dir.file("s.json"));
    CHECK(s.train == std::vector<std::string>{"q1"});
    CHECK(s.seed == 4);
}

TEST_CASE("split validation") {
    const auto c = two_docs();
    const auto qs = resolve_questions({{"a", "t", {}, {}, {}}, {"b", "t", {}, {}, {}}}, c);
    SplitSpec ok{{"a"}, {"b"}, {}, 0};
    CHECK_NOTHROW(ok.validate(qs));
    SplitSpec overlap{{"a"}, {"a"}, {}, 0};
    CHECK_THROWS_AS(overlap.validate(qs), DataError);
    SplitSpec unknown{{"z"}, {}, {}, 0};
    CHECK_THROWS_AS(unknown.validate(qs), DataError);
    CHECK(select(qs, {"b", "a"})[0].id == "b");
}

// ---- Natural Questions conversion ----

namespace {

Lines<ParagraphRecord> paragraphs(std::vector<ParagraphRecord> p) {
    Lines<ParagraphRecord> out;
    for (std::size_t i = 0; i < p.size(); ++i) out.lines.push_back(i + 1);
    out.records = std::move(p);
    return out;
}

Lines<NqAnnotation> annotations(std::vector<NqAnnotation> a) {
    Lines<NqAnnotation> out;
    for (std::size_t i = 0; i < a.size(); ++i) out.lines.push_back(i + 1);
    out.records = std::move(a);
    return out;
}

} // namespace

TEST_CASE("nq conversion basics") {
    const auto ps = paragraphs({{"Cats", 0, "Cats purr loudly. They sleep a lot.", false},
                                {"Cats", 1, "| table | of | cats |", true},
                                {"Dogs", 0, "Dogs bark at night.", false},
                                {"Dogs", 1, "   ", false}});
    const auto as = annotations({
        {"q1", "why do cats purr", {{"Cats", 0}}, {{"Cats", 0, 0, 4}}},
        {"q2", "cat table", {{"Cats", 1}}, {}},
        {"q3", "no answer", {}, {}},
        {"q4", "do dogs bark", {{"Dogs", 0}, {"Dogs", 1}}, {}},
    });
    const auto ds = convert_nq(ps, as, {});
    CHECK(ds.corpus.size() == 2);
    CHECK(ds.stats.tables_dropped == 1);
    CHECK(ds.stats.dropped_table_answer == 1);
    CHECK(ds.stats.dropped_no_long_answer == 1);
    CHECK(ds.stats.kept == 2);
    REQUIRE(ds.questions.size() == 2);
    CHECK(ds.questions[0].gold_docs == std::vector<std::string>{"Cats_p0"});
    CHECK(ds.questions[1].gold_docs == std::vector<std::string>{"Dogs_p0"});

    // The short answer "Cats" marks the first sentence.
    const auto corpus = Corpus::from_records(ds.corpus);
    const auto qs = resolve_questions(ds.questions, corpus);
    CHECK(qs[0].gold_snippets == std::set<SentenceRef>{{*corpus.find("Cats_p0"), 0}});
}

TEST_CASE("nq conversion errors") {
    const auto ps = paragraphs({{"A", 0, "Alpha text.", false}, {"A", 1, "Beta text.", false}});
    CHECK_THROWS_AS(convert_nq(ps, annotations({{"q", "alpha", {{"B", 0}}, {}}}), {}), DataError);
    CHECK_THROWS_AS(convert_nq(ps, annotations({{"q", "alpha", {{"A", 0}}, {{"A", 1, 0, 3}}}}), {}), DataError);
    CHECK_THROWS_AS(convert_nq(paragraphs({{"A", 0, "x", false}, {"A", 0, "y", false}}), annotations({}), {}),
                    DataError);
}

TEST_CASE("nq filter drops a question whose gold paragraph ranks just past N") {
    // 100 strong paragraphs, then the gold one with a much weaker match.
    std::vector<ParagraphRecord> p;
    for (std::uint32_t i = 0; i < 100; ++i) p.push_back({"Strong", i, "zebra zebra stripes", false});
    p.push_back({"Gold", 0, "a zebra among many many many other long words in this paragraph", false});
    for (std::uint32_t i = 0; i < 20; ++i) p.push_back({"Filler", i, "nothing relevant here", false});
    const auto ps = paragraphs(p);
    const auto as = annotations({{"q", "zebra", {{"Gold", 0}}, {}}});

    NqOptions at100;
    const auto dropped = convert_nq(ps, as, at100);
    CHECK(dropped.stats.dropped_not_retrieved == 1);
    CHECK(dropped.questions.empty());

    NqOptions at101;
    at101.top_n = 101;
    const auto kept = convert_nq(ps, as, at101);
    CHECK(kept.questions.size() == 1);
}

TEST_CASE("nq conversion is deterministic") {
    const auto ps = paragraphs({{"A", 0, "Alpha beta.", false}, {"B", 0, "Gamma delta.", false}});
    const auto as = annotations({{"q", "alpha", {{"A", 0}}, {}}, {"r", "gamma", {{"B", 0}}, {}}});
    const auto a = convert_nq(ps, as, {});
    const auto b = convert_nq(ps, as, {});
    REQUIRE(a.questions.size() == b.questions.size());
    for (std::size_t i = 0; i < a.questions.size(); ++i) CHECK(a.questions[i].id == b.questions[i].id);
}

TEST_CASE("nq files are read with line numbers") {
    testing::TempDir dir;
    testing::write_text(dir.file("p.jsonl"), "{\"page\":\"A\",\"index\":0,\"text\":\"x\"}\n{\"page\":\"A\"}\n");
    try {
        read_paragraphs(dir.file("p.jsonl"));
        FAIL("expected FormatError");
    } catch (const FormatError& e) {
        CHECK(e.line() == 2);
    }
    testing::write_text(dir.file("a.jsonl"),
                        "{\"id\":\"q\",\"question\":\"x\",\"long_answers\":[{\"page\":\"A\",\"index\":0}],"
                        "\"short_answers\":[{\"page\":\"A\",\"index\":0,\"begin\":0,\"end\":1}]}\n");
    const auto a = read_annotations(dir.file("a.jsonl"));
    CHECK(a.records[0].short_answers[0].end == 1);
    CHECK(paragraph_doc_id("Some page", 3) == "Some page_p3");
}

// ---- synthetic data ----

namespace {

SyntheticOptions small(double signal, std::uint64_t seed = 3) {
    SyntheticOptions o;
    o.n_docs = 300;
    o.n_train = 20;
    o.n_dev = 10;
    o.n_test = 40;
    o.vocab_size = 600;
    o.dimension = 8;
    o.signal = signal;
    o.seed = seed;
    return o;
}

std::set<std::string> content_terms(const std::string& question) {
    std::set<std::string> out;
    const auto toks = text::tokenize(question);
    for (std::size_t i = 1; i < toks.size(); ++i) // skip the question word
        if (!text::default_stopwords().count(toks[i])) out.insert(toks[i]);
    return out;
}

} // namespace

TEST_CASE("synthetic data is deterministic per seed") {
    const auto a = generate_synthetic(small(0.8));
    const auto b = generate_synthetic(small(0.8));
    const auto c = generate_synthetic(small(0.8, 4));
    REQUIRE(a.corpus.size() == b.corpus.size());
    for (std::size_t i = 0; i < a.corpus.size(); ++i) CHECK(a.corpus[i].body == b.corpus[i].body);
    for (std::size_t i = 0; i < a.questions.size(); ++i) CHECK(a.questions[i].text == b.questions[i].text);
    CHECK(a.vectors == b.vectors);
    bool differs = false;
    for (std::size_t i = 0; i < a.corpus.size() && !differs; ++i) differs = a.corpus[i].body != c.corpus[i].body;
    CHECK(differs);
}

TEST_CASE("synthetic data shape") {
    const auto o = small(0.8);
    const auto ds = generate_synthetic(o);
    CHECK(ds.corpus.size() == o.n_docs);
    CHECK(ds.questions.size() == o.n_questions());
    CHECK(ds.split.train.size() == o.n_train);
    CHECK(ds.split.dev.size() == o.n_dev);
    CHECK(ds.split.test.size() == o.n_test);
    std::set<std::string> ids;
    for (const auto& d : ds.corpus) {
        ids.insert(d.id);
        REQUIRE(d.sentences);
        CHECK(d.sentences->size() >= 3);
        CHECK(d.sentences->size() <= 8);
    }
    CHECK(ids.size() == ds.corpus.size());
    for (const auto& q : ds.questions) {
        CHECK(q.gold_docs.size() >= 1);
        CHECK(q.gold_docs.size() <= 2);
        // Exactly one answer sentence per gold document.
        CHECK(q.gold_sentences.size() == q.gold_docs.size());
        for (std::size_t i = 0; i < q.gold_docs.size(); ++i) CHECK(q.gold_sentences[i].doc == q.gold_docs[i]);
    }
    // The files load as a valid dataset.
    testing::TempDir dir;
    write_synthetic(dir.path().string(), ds);
    const auto loaded = ingest(dir.file("corpus.jsonl"), dir.file("questions.jsonl"));
    CHECK(loaded.questions.size() == ds.questions.size());
    CHECK_NOTHROW(read_split(dir.file("split.json")).validate(loaded.questions));
}

TEST_CASE("signal 1 plants every query term in the answer sentence") {
    const auto ds = generate_synthetic(small(1.0));
    const auto corpus = Corpus::from_records(ds.corpus);
    for (const auto& q : ds.questions) {
        const auto terms = content_terms(q.text);
        CHECK(terms.size() >= 3);
        for (const auto& g : q.gold_sentences) {
            const auto& toks = corpus[*corpus.find(g.doc)].sentences[g.sentence].tokens;
            const std::set<std::string> have(toks.begin(), toks.end());
            for (const auto& t : terms) CHECK(have.count(t));
        }
    }
}

TEST_CASE("signal 0 leaves lexical snippet retrieval no better than chance") {
    // BM25 snippet MAP against the expected MAP of a random order of the same
    // candidate sentences, estimated by shuffling.
    auto o = small(0.0, 9);
    testing::SmallCollection sc(o);
    const auto& ws = *sc.ws;
    const auto questions = ws.questions(sc.dataset.split.test);
    const auto ctx = ws.context();
    const model::RankLimits limits{10, 10};
    Rng rng(99);
    double bm25_map = 0.0, random_map = 0.0;
    std::size_t n = 0;
    for (const auto& q : questions) {
        std::set<std::string> gold;
        for (const auto& s : q.gold_snippets) gold.insert(std::to_string(s.doc) + ":" + std::to_string(s.sentence));
        const auto r = model::rank_bm25(q.terms, ctx, limits);
        std::vector<std::string> ranked, pool;
        for (const auto& s : r.sentences) ranked.push_back(std::to_string(s.ref.doc) + ":" + std::to_string(s.ref.sentence));
        for (const auto& d : r.docs)
            for (std::uint32_t s = 0; s < ws.data.corpus[d.doc].sentences.size(); ++s)
                pool.push_back(std::to_string(d.doc) + ":" + std::to_string(s));
        bm25_map += eval::average_precision(ranked, gold, 10);
        double avg = 0.0;
        for (int t = 0; t < 200; ++t) {
            rng.shuffle(pool);
            const std::vector<std::string> top(pool.begin(), pool.begin() + std::min<std::ptrdiff_t>(10, pool.size()));
            avg += eval::average_precision(top, gold, 10);
        }
        random_map += avg / 200.0;
        ++n;
    }
    bm25_map /= static_cast<double>(n);
    random_map /= static_cast<double>(n);
    MESSAGE("signal 0: bm25 snippet MAP " << bm25_map << ", random " << random_map);
    CHECK(bm25_map <= random_map + 0.02);

    // With full signal, lexical retrieval is far above chance.
    testing::SmallCollection strong(small(1.0, 9));
    double strong_map = 0.0;
    const auto strong_ctx = strong.ws->context();
    for (const auto& q : strong.ws->questions(strong.dataset.split.test)) {
        std::set<std::string> gold;
        for (const auto& s : q.gold_snippets) gold.insert(std::to_string(s.doc) + ":" + std::to_string(s.sentence));
        const auto r = model::rank_bm25(q.terms, strong_ctx, limits);
        std::vector<std::string> ranked;
        for (const auto& s : r.sentences) ranked.push_back(std::to_string(s.ref.doc) + ":" + std::to_string(s.ref.sentence));
        strong_map += eval::average_precision(ranked, gold, 10);
    }
    strong_map /= static_cast<double>(strong.dataset.split.test.size());
    CHECK(strong_map > random_map + 0.3);
}

TEST_CASE("synthetic option validation") {
    auto o = small(0.5);
    o.signal = 1.5;
    CHECK_THROWS_AS(generate_synthetic(o), ArgumentError);
    o = small(0.5);
    o.n_docs = 10; // too few for the gold documents
    CHECK_THROWS_AS(generate_synthetic(o), ArgumentError);
}
