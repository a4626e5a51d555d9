#pragma once

#include "jrank/data/corpus.hpp"

#include <cstdint>
#include <string>
#include <vector>

namespace jrank::data {

struct SyntheticOptions {
    std::size_t n_docs = 2000;
    std::size_t n_train = 500;
    std::size_t n_dev = 50;
    std::size_t n_test = 100;
    std::size_t vocab_size = 3000;
    std::size_t dimension = 30;
    /// Probability that a planted query term appears verbatim rather than as its synonym.
    double signal = 0.8;
    std::uint64_t seed = 1;

    std::size_t n_questions() const noexcept { return n_train + n_dev + n_test; }
    /// Throws ArgumentError on zero counts or a signal outside [0, 1].
    void validate() const;
};

/// Generated corpus, questions, split and word vectors.
///
/// The vocabulary is made of pseudo-words with Zipf frequencies; words 2i and
/// 2i+1 are synonyms with nearby vectors. Every question is a short phrase of
/// 3-5 content words. Each of its 1-2 gold documents has one answer sentence
/// holding the phrase, where each word is kept verbatim with probability
/// `signal` and replaced by its synonym otherwise. One or two other sentences
/// of a gold document mention some of the query words. Distractor documents spread
/// subsets of the query words, some repeated, over 2-3 sentences. The rest of
/// the collection is background text.
struct SyntheticDataset {
    std::vector<CorpusRecord> corpus;
    std::vector<QuestionRecord> questions;
    SplitSpec split;
    std::vector<std::string> vocabulary;
    std::vector<std::vector<double>> vectors;
};

SyntheticDataset generate_synthetic(const SyntheticOptions& options);

/// Writes corpus.jsonl, questions.jsonl, split.json and embeddings.txt into `dir`.
void write_synthetic(const std::string& dir, const SyntheticDataset& dataset);

} // namespace jrank::data
