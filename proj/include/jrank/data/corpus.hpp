#pragma once

#include "jrank/index/bm25.hpp"
#include "jrank/text/term_table.hpp"
#include "jrank/text/tokenize.hpp"

#include <cstdint>
#include <optional>
#include <set>
#include <string>
#include <unordered_map>
#include <vector>

namespace jrank::data {

using index::DocNo;
using index::SentenceRef;
using text::TermId;

/// One line of a corpus file.
struct CorpusRecord {
    std::string id;
    std::string title;
    std::string body;
    /// Pre-split body sentences; each must occur in `body`, in order.
    std::optional<std::vector<std::string>> sentences;
};

/// Gold passage given by byte offsets into the document text.
struct GoldSpan {
    std::string doc;
    std::size_t begin = 0;
    std::size_t end = 0;
};

/// Gold passage given by sentence index.
struct GoldSentence {
    std::string doc;
    std::uint32_t sentence = 0;
};

/// One line of a questions file.
struct QuestionRecord {
    std::string id;
    std::string text;
    std::vector<std::string> gold_docs;
    std::vector<GoldSentence> gold_sentences;
    std::vector<GoldSpan> gold_spans;
};

struct Sentence {
    text::CharSpan span;
    std::vector<std::string> tokens;
    std::vector<TermId> terms;
    std::size_t char_length = 0;
};

/// A document: its text is the title (when present) as sentence 0, a single
/// space, then the body. Documents are ordered token/sentence sequences.
struct Document {
    std::string id;
    std::string text;
    std::vector<Sentence> sentences;
    std::vector<TermId> terms;

    std::size_t token_count() const;
};

class Corpus : public index::SentenceSource {
public:
    /// Splits and tokenizes every record. Throws DataError on duplicate or
    /// empty ids and empty bodies, FormatError when pre-split sentences are not
    /// found in the body.
    static Corpus from_records(const std::vector<CorpusRecord>& records,
                               const text::WordList& abbreviations = text::default_abbreviations());

    /// Fills term ids from the table.
    void encode(const text::TermTable& table);

    /// Token strings of every document, for building a TermTable.
    std::vector<std::vector<std::string>> token_lists() const;

    std::size_t size() const noexcept { return docs_.size(); }
    const Document& operator[](DocNo d) const { return docs_.at(d); }
    const std::vector<Document>& documents() const noexcept { return docs_; }
    std::optional<DocNo> find(const std::string& id) const;
    std::vector<std::string> ids() const;
    std::vector<std::vector<TermId>> term_lists() const;

    std::size_t sentence_count(DocNo doc) const override { return docs_.at(doc).sentences.size(); }
    std::span<const TermId> sentence_terms(DocNo doc, std::uint32_t s) const override {
        return docs_.at(doc).sentences.at(s).terms;
    }

private:
    std::vector<Document> docs_;
    std::unordered_map<std::string, DocNo> by_id_;
};

struct Question {
    std::string id;
    std::string text;
    std::vector<std::string> tokens;
    std::vector<TermId> terms;
    std::size_t char_length = 0;
    std::set<DocNo> gold_docs;
    std::set<SentenceRef> gold_snippets;
};

/// Resolves records against the corpus. A sentence is a gold snippet when it
/// is listed by index, or when its span overlaps a gold span by at least one
/// character. Throws DataError for dangling document ids, out-of-range
/// sentence indices, and snippets outside the question's gold documents;
/// `lines` (when given) maps records to file lines for the message.
std::vector<Question> resolve_questions(const std::vector<QuestionRecord>& records, const Corpus& corpus,
                                        const std::vector<std::size_t>* lines = nullptr,
                                        const std::string& source = "questions");

void encode_questions(std::vector<Question>& questions, const text::TermTable& table);

/// Train/dev/test question ids.
struct SplitSpec {
    std::vector<std::string> train;
    std::vector<std::string> dev;
    std::vector<std::string> test;
    std::uint64_t seed = 0;

    /// Throws DataError if the lists overlap or name unknown questions.
    void validate(const std::vector<Question>& questions) const;
};

/// Questions whose ids are listed, in list order.
std::vector<Question> select(const std::vector<Question>& questions, const std::vector<std::string>& ids);

} // namespace jrank::data
