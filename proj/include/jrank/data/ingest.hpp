#pragma once

#include "jrank/data/corpus.hpp"

#include <string>
#include <vector>

namespace jrank::data {

/// Records paired with the 1-based file line each came from.
template <typename Record>
struct Lines {
    std::vector<Record> records;
    std::vector<std::size_t> lines;
};

/// Corpus file: one JSON object per line,
///   {"id": str, "title": str?, "body": str, "sentences": [str]?}
/// Blank lines are skipped. Throws FormatError with the line number.
Lines<CorpusRecord> read_corpus(const std::string& path);
void write_corpus(const std::string& path, const std::vector<CorpusRecord>& records);

/// Questions file: one JSON object per line,
///   {"id": str, "text": str, "gold_docs": [str],
///    "gold_snippets": [{"doc": str, "sentence": int} | {"doc": str, "begin": int, "end": int}]}
Lines<QuestionRecord> read_questions(const std::string& path);
void write_questions(const std::string& path, const std::vector<QuestionRecord>& records);

/// Split file: {"seed": int, "train": [str], "dev": [str], "test": [str]}.
SplitSpec read_split(const std::string& path);
void write_split(const std::string& path, const SplitSpec& split);

struct Dataset {
    Corpus corpus;
    std::vector<Question> questions;
};

/// Reads both files and resolves the questions; terms are not encoded yet.
Dataset ingest(const std::string& corpus_path, const std::string& questions_path,
               const text::WordList& abbreviations = text::default_abbreviations());

} // namespace jrank::data
