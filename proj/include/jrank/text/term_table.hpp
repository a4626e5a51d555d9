#pragma once

#include "jrank/ad/array.hpp"
#include "jrank/text/tokenize.hpp"

#include <cstddef>
#include <cstdint>
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <unordered_map>
#include <unordered_set>
#include <vector>

namespace jrank::text {

using TermId = std::uint32_t;
/// Sentinel for terms outside the vocabulary. Its embedding is the zero vector.
inline constexpr TermId kUnknownTerm = 0;
inline constexpr std::string_view kUnknownToken = "<unk>";

/// ln((n_docs - df + 0.5) / (df + 0.5) + 1). Strictly positive for df <= n_docs.
double smoothed_idf(std::size_t df, std::size_t n_docs);

/// Static vectors read from a word2vec text file.
struct Embeddings {
    std::size_t dimension = 0;
    std::unordered_map<std::string, std::vector<double>> vectors;
};

/// Reads the word2vec text format: a "V d" header line, then one
/// "token v1 ... vd" line per vector. When `keep` is given, only those tokens
/// are retained. Throws FormatError with the 1-based line number on malformed
/// lines or a value count different from d.
Embeddings load_word2vec_text(const std::string& path,
                              const std::unordered_set<std::string>* keep = nullptr);
void save_word2vec_text(const std::string& path, const std::vector<std::string>& tokens,
                        const std::vector<std::vector<double>>& vectors);

struct TermTableOptions {
    /// Used when no embedding file is given; otherwise the file decides.
    std::size_t dimension = 30;
    /// Seed for vectors of terms the embedding file lacks.
    std::uint64_t seed = 13;
    const WordList* stopwords = nullptr; // default_stopwords() when null
};

/// Vocabulary with document frequencies, IDF, stopword flags and one static
/// embedding per term. Term ids are assigned in lexicographic order after the
/// unknown sentinel, so equal vocabularies give equal tables. Immutable once
/// built.
class TermTable {
public:
    TermTable() = default;

    /// `documents` are token sequences; df counts the documents holding a term.
    static TermTable build(std::span<const std::vector<std::string>> documents,
                           const Embeddings* embeddings = nullptr, TermTableOptions options = {});

    TermId id(std::string_view token) const;
    std::vector<TermId> encode(std::span<const std::string> tokens) const;

    const std::string& term(TermId id) const { return entries_.at(id).term; }
    std::size_t df(TermId id) const { return entries_.at(id).df; }
    double idf(TermId id) const { return entries_.at(id).idf; }
    bool is_stopword(TermId id) const { return entries_.at(id).stopword; }
    std::span<const double> embedding(TermId id) const;

    /// Rows are the embeddings of `ids`, giving (ids.size() x dimension).
    ad::Array embed(std::span<const TermId> ids) const;

    std::size_t size() const noexcept { return entries_.size(); }
    std::size_t dimension() const noexcept { return dimension_; }
    std::size_t document_count() const noexcept { return n_docs_; }
    /// Number of terms whose vector came from the embedding file.
    std::size_t loaded_vectors() const noexcept { return loaded_; }

private:
    struct Entry {
        std::string term;
        std::size_t df = 0;
        double idf = 0.0;
        bool stopword = false;
    };

    std::vector<Entry> entries_;
    std::unordered_map<std::string, TermId> ids_;
    std::vector<double> vectors_;
    std::size_t dimension_ = 0;
    std::size_t n_docs_ = 0;
    std::size_t loaded_ = 0;
};

} // namespace jrank::text
