#pragma once

#include "jrank/data/corpus.hpp"
#include "jrank/data/ingest.hpp"
#include "jrank/index/bm25.hpp"

#include <string>
#include <vector>

namespace jrank::data {

/// One pre-extracted paragraph:
///   {"page": str, "index": int, "text": str, "is_table": bool?}
struct ParagraphRecord {
    std::string page;
    std::uint32_t index = 0;
    std::string text;
    bool is_table = false;
};

struct ParagraphRef {
    std::string page;
    std::uint32_t index = 0;
};

/// Byte span inside one paragraph's text.
struct ShortAnswer {
    std::string page;
    std::uint32_t index = 0;
    std::size_t begin = 0;
    std::size_t end = 0;
};

/// One annotated question:
///   {"id": str, "question": str,
///    "long_answers": [{"page": str, "index": int}],
///    "short_answers": [{"page": str, "index": int, "begin": int, "end": int}]}
struct NqAnnotation {
    std::string id;
    std::string question;
    std::vector<ParagraphRef> long_answers;
    std::vector<ShortAnswer> short_answers;
};

Lines<ParagraphRecord> read_paragraphs(const std::string& path);
Lines<NqAnnotation> read_annotations(const std::string& path);

/// Document id of a paragraph: "<page>_p<index>".
std::string paragraph_doc_id(const std::string& page, std::uint32_t index);

struct NqOptions {
    index::Bm25Params bm25;
    std::size_t top_n = 100;
};

struct NqStats {
    std::size_t paragraphs = 0;
    std::size_t tables_dropped = 0;
    std::size_t questions = 0;
    std::size_t dropped_table_answer = 0;
    std::size_t dropped_no_long_answer = 0;
    std::size_t dropped_not_retrieved = 0;
    std::size_t kept = 0;
};

struct NqDataset {
    std::vector<CorpusRecord> corpus;
    std::vector<QuestionRecord> questions;
    NqStats stats;
};

/// Drops table paragraphs and the questions they answer, turns every other
/// paragraph into a document, makes long-answer paragraphs the gold documents
/// and short-answer spans the gold snippet spans, then drops questions with no
/// gold paragraph in their BM25 top-N. Throws DataError when an annotation
/// references a paragraph that does not exist or a short answer lies outside
/// the question's long answers.
NqDataset convert_nq(const Lines<ParagraphRecord>& paragraphs, const Lines<NqAnnotation>& annotations,
                     const NqOptions& options, const text::WordList& abbreviations = text::default_abbreviations());

} // namespace jrank::data
