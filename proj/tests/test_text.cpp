#include "jrank/error.hpp"
#include "jrank/text/lexical.hpp"
#include "jrank/text/term_table.hpp"
#include "jrank/text/tokenize.hpp"

#include "support.hpp"

#include <doctest.h>

#include <cmath>

using namespace jrank;
using namespace jrank::text;

namespace {

std::vector<std::string> pieces(std::string_view text, const WordList& abbrevs = default_abbreviations()) {
    std::vector<std::string> out;
    for (const auto& s : split_sentences(text, abbrevs)) out.emplace_back(text.substr(s.begin, s.end - s.begin));
    return out;
}

} // namespace

TEST_CASE("tokenize lowercases and splits on punctuation") {
    CHECK(tokenize("The p53-MDM2 loop, revisited!") == std::vector<std::string>{"the", "p53", "mdm2", "loop", "revisited"});
    CHECK(tokenize("").empty());
    CHECK(tokenize("  ...  ").empty());
    CHECK(tokenize("IL-6") == std::vector<std::string>{"il", "6"});
}

TEST_CASE("tokenize keeps UTF-8 words whole") {
    CHECK(tokenize("naïve café") == std::vector<std::string>{"naïve", "café"});
    CHECK(char_length("naïve") == 5);
    CHECK(char_length("abc") == 3);
}

TEST_CASE("sentence splitting") {
    CHECK(pieces("First one. Second one? Third!") == std::vector<std::string>{"First one.", "Second one?", "Third!"});
    // Lowercase continuations do not start a new sentence.
    CHECK(pieces("Values rose to 3.5 mg. and then fell.") == std::vector<std::string>{"Values rose to 3.5 mg. and then fell."});
    // Abbreviations are guarded.
    CHECK(pieces("See e.g. Smith et al. The end.").size() == 1);
    CHECK(pieces("Dr. Who arrived. He left.") == std::vector<std::string>{"Dr. Who arrived.", "He left."});
    // Closing quotes stay with their sentence.
    CHECK(pieces("He said \"stop.\" Then 2 more.") == std::vector<std::string>{"He said \"stop.\"", "Then 2 more."});
    CHECK(pieces("").empty());
    CHECK(pieces("   ").empty());
}

TEST_CASE("sentence spans cover all non-whitespace text") {
    const std::string text = "  Alpha beta. Gamma (delta). 3 epsilon!  Zeta";
    const auto spans = split_sentences(text);
    std::size_t covered = 0, non_space = 0;
    std::size_t prev_end = 0;
    for (const auto& s : spans) {
        CHECK(s.begin >= prev_end);
        CHECK(s.end > s.begin);
        prev_end = s.end;
        for (std::size_t i = s.begin; i < s.end; ++i) covered += text[i] != ' ';
    }
    for (char c : text) non_space += c != ' ';
    CHECK(covered == non_space);
    CHECK(spans.size() == 4);
}

TEST_CASE("custom abbreviation lists") {
    WordList none;
    CHECK(pieces("See Fig. Two.", none).size() == 2);
    CHECK(pieces("See Fig. Two.").size() == 1);
}

TEST_CASE("word lists skip comments and blank lines") {
    testing::TempDir dir;
    testing::write_text(dir.file("w.txt"), "# comment\nfoo\n\n  bar  \n");
    const auto w = load_word_list(dir.file("w.txt"));
    CHECK(w == WordList{"foo", "bar"});
    CHECK_THROWS_AS(load_word_list(dir.file("absent.txt")), IoError);
}

TEST_CASE("smoothed idf") {
    CHECK(smoothed_idf(1, 10) == doctest::Approx(std::log(9.5 / 1.5 + 1.0)));
    // Positive even for a term in every document.
    CHECK(smoothed_idf(10, 10) > 0.0);
    CHECK(smoothed_idf(1, 10) > smoothed_idf(5, 10));
}

TEST_CASE("term table ids, df and stopwords") {
    const std::vector<std::vector<std::string>> docs = {{"the", "cat", "sat"}, {"the", "dog"}, {"cat", "cat"}};
    const auto t = TermTable::build(docs);
    CHECK(t.size() == 5); // <unk> + 4 terms
    CHECK(t.id("cat") != kUnknownTerm);
    CHECK(t.id("zebra") == kUnknownTerm);
    CHECK(t.df(t.id("cat")) == 2);
    CHECK(t.df(t.id("the")) == 2);
    CHECK(t.df(t.id("sat")) == 1);
    CHECK(t.is_stopword(t.id("the")));
    CHECK_FALSE(t.is_stopword(t.id("cat")));
    CHECK(t.idf(t.id("sat")) == doctest::Approx(smoothed_idf(1, 3)));
    // Lexicographic ids.
    CHECK(t.id("cat") < t.id("dog"));
    CHECK(t.id("dog") < t.id("sat"));
    // Unknown terms embed to zero.
    for (double v : t.embedding(kUnknownTerm)) CHECK(v == 0.0);
    CHECK(t.encode(std::vector<std::string>{"dog", "zebra"}) == std::vector<TermId>{t.id("dog"), kUnknownTerm});
}

TEST_CASE("term table vectors are deterministic and sized") {
    const std::vector<std::vector<std::string>> docs = {{"alpha", "beta"}, {"gamma"}};
    TermTableOptions o;
    o.dimension = 7;
    const auto a = TermTable::build(docs, nullptr, o);
    const auto b = TermTable::build(docs, nullptr, o);
    CHECK(a.dimension() == 7);
    const auto ea = a.embedding(a.id("beta"));
    const auto eb = b.embedding(b.id("beta"));
    CHECK(std::equal(ea.begin(), ea.end(), eb.begin()));
    const auto m = a.embed(std::vector<TermId>{a.id("alpha"), kUnknownTerm});
    CHECK(m.rows() == 2);
    CHECK(m.cols() == 7);
}

TEST_CASE("word2vec text round trip and errors") {
    testing::TempDir dir;
    save_word2vec_text(dir.file("e.txt"), {"cat", "dog"}, {{1.0, 0.0}, {0.5, -0.25}});
    const auto emb = load_word2vec_text(dir.file("e.txt"));
    CHECK(emb.dimension == 2);
    CHECK(emb.vectors.at("dog")[1] == doctest::Approx(-0.25));

    const std::unordered_set<std::string> keep = {"dog"};
    CHECK(load_word2vec_text(dir.file("e.txt"), &keep).vectors.size() == 1);

    const std::vector<std::vector<std::string>> docs = {{"cat", "dog", "emu"}};
    const auto t = TermTable::build(docs, &emb);
    CHECK(t.loaded_vectors() == 2);
    CHECK(t.embedding(t.id("cat"))[0] == 1.0);

    testing::write_text(dir.file("bad.txt"), "2 3\ncat 1 2 3\ndog 1 2\n");
    try {
        load_word2vec_text(dir.file("bad.txt"));
        FAIL("expected a FormatError");
    } catch (const FormatError& e) {
        CHECK(e.line() == 3);
    }
    testing::write_text(dir.file("count.txt"), "3 1\na 1\nb 2\n");
    CHECK_THROWS_AS(load_word2vec_text(dir.file("count.txt")), FormatError);
    testing::write_text(dir.file("nan.txt"), "1 1\na x\n");
    CHECK_THROWS_AS(load_word2vec_text(dir.file("nan.txt")), FormatError);
    CHECK_THROWS_AS(load_word2vec_text(dir.file("none.txt")), IoError);
}

TEST_CASE("lexical overlap counts") {
    const std::vector<std::vector<std::string>> docs = {{"the", "red", "fox", "runs"}, {"a", "fox"}, {"red", "sun"}};
    const auto t = TermTable::build(docs);
    const auto q = t.encode(std::vector<std::string>{"the", "red", "fox", "red"});
    const auto s = t.encode(std::vector<std::string>{"red", "fox", "the", "sun"});
    const auto f = lexical_overlap(q, s, t);
    CHECK(f.shared_tokens == 3.0); // distinct q-terms: the, red, fox
    CHECK(f.shared_tokens_no_stop == 2.0);
    const double idf_the = t.idf(t.id("the")), idf_red = t.idf(t.id("red")), idf_fox = t.idf(t.id("fox"));
    CHECK(f.shared_idf == doctest::Approx(idf_the + idf_red + idf_fox));
    CHECK(f.shared_idf_no_stop == doctest::Approx(idf_red + idf_fox));
    CHECK(f.idf_share == doctest::Approx(1.0));
    // q bigrams: (the red), (red fox), (fox red); s has (red fox) only.
    CHECK(f.shared_bigrams == 1.0);

    const auto none = lexical_overlap(q, t.encode(std::vector<std::string>{"sun"}), t);
    CHECK(none.shared_tokens == 0.0);
    CHECK(none.idf_share == 0.0);
}
