#include "jrank/text/term_table.hpp"

#include "jrank/error.hpp"
#include "jrank/rng.hpp"

#include <algorithm>
#include <charconv>
#include <cmath>
#include <fstream>
#include <map>
#include <sstream>

namespace jrank::text {

double smoothed_idf(std::size_t df, std::size_t n_docs) {
    const double n = static_cast<double>(n_docs);
    const double f = static_cast<double>(df);
    return std::log((n - f + 0.5) / (f + 0.5) + 1.0);
}

namespace {

std::vector<std::string_view> fields(std::string_view line) {
    std::vector<std::string_view> out;
    std::size_t i = 0;
    while (i < line.size()) {
        while (i < line.size() && (line[i] == ' ' || line[i] == '\t' || line[i] == '\r')) ++i;
        std::size_t j = i;
        while (j < line.size() && line[j] != ' ' && line[j] != '\t' && line[j] != '\r') ++j;
        if (j > i) out.push_back(line.substr(i, j - i));
        i = j;
    }
    return out;
}

bool parse_double(std::string_view s, double& out) {
    // std::from_chars for double is available in libstdc++ 11.
    const auto res = std::from_chars(s.data(), s.data() + s.size(), out);
    return res.ec == std::errc() && res.ptr == s.data() + s.size();
}

bool parse_size(std::string_view s, std::size_t& out) {
    const auto res = std::from_chars(s.data(), s.data() + s.size(), out);
    return res.ec == std::errc() && res.ptr == s.data() + s.size();
}

} // namespace

Embeddings load_word2vec_text(const std::string& path, const std::unordered_set<std::string>* keep) {
    std::ifstream in(path);
    if (!in) throw IoError("cannot open embeddings file: " + path);
    Embeddings emb;
    std::string line;
    std::size_t lineno = 0;
    std::size_t declared = 0;
    if (!std::getline(in, line)) throw FormatError(path, 1, "missing \"V d\" header");
    ++lineno;
    {
        const auto f = fields(line);
        if (f.size() != 2 || !parse_size(f[0], declared) || !parse_size(f[1], emb.dimension) ||
            emb.dimension == 0)
            throw FormatError(path, lineno, "header must be \"V d\" with positive d");
    }
    std::size_t seen = 0;
    while (std::getline(in, line)) {
        ++lineno;
        const auto f = fields(line);
        if (f.empty()) continue;
        if (f.size() != emb.dimension + 1)
            throw FormatError(path, lineno,
                              "dimension mismatch: expected " + std::to_string(emb.dimension) +
                                  " values, got " + std::to_string(f.size() - 1));
        ++seen;
        std::string token(f[0]);
        std::vector<double> v(emb.dimension);
        for (std::size_t k = 0; k < emb.dimension; ++k)
            if (!parse_double(f[k + 1], v[k]) || !std::isfinite(v[k]))
                throw FormatError(path, lineno, "malformed value '" + std::string(f[k + 1]) + "'");
        if (keep && !keep->count(token)) continue;
        emb.vectors.emplace(std::move(token), std::move(v));
    }
    if (seen != declared)
        throw FormatError(path, lineno,
                          "header declares " + std::to_string(declared) + " vectors, file has " +
                              std::to_string(seen));
    return emb;
}

void save_word2vec_text(const std::string& path, const std::vector<std::string>& tokens,
                        const std::vector<std::vector<double>>& vectors) {
    if (tokens.size() != vectors.size()) throw ArgumentError("save_word2vec_text: size mismatch");
    std::ofstream out(path);
    if (!out) throw IoError("cannot write embeddings file: " + path);
    const std::size_t d = vectors.empty() ? 0 : vectors.front().size();
    out << tokens.size() << ' ' << d << '\n';
    char buf[32];
    for (std::size_t i = 0; i < tokens.size(); ++i) {
        out << tokens[i];
        for (double v : vectors[i]) {
            std::snprintf(buf, sizeof buf, " %.6f", v);
            out << buf;
        }
        out << '\n';
    }
    if (!out) throw IoError("failed writing embeddings file: " + path);
}

TermTable TermTable::build(std::span<const std::vector<std::string>> documents,
                           const Embeddings* embeddings, TermTableOptions options) {
    const WordList& stop = options.stopwords ? *options.stopwords : default_stopwords();
    std::map<std::string, std::size_t> df;
    std::unordered_set<std::string_view> seen;
    for (const auto& doc : documents) {
        seen.clear();
        for (const auto& tok : doc)
            if (seen.insert(tok).second) ++df[tok];
    }

    TermTable t;
    t.n_docs_ = documents.size();
    t.dimension_ = embeddings ? embeddings->dimension : options.dimension;
    if (t.dimension_ == 0) throw ArgumentError("TermTable: embedding dimension must be positive");
    t.entries_.reserve(df.size() + 1);
    t.entries_.push_back({std::string(kUnknownToken), 0, smoothed_idf(0, t.n_docs_), false});
    for (const auto& [term, count] : df) {
        t.ids_.emplace(term, static_cast<TermId>(t.entries_.size()));
        t.entries_.push_back({term, count, smoothed_idf(count, t.n_docs_), stop.count(term) != 0});
    }

    const std::size_t d = t.dimension_;
    t.vectors_.assign(t.entries_.size() * d, 0.0);
    std::vector<bool> have(t.entries_.size(), false);
    double norm_sum = 0.0;
    if (embeddings) {
        for (std::size_t i = 1; i < t.entries_.size(); ++i) {
            auto it = embeddings->vectors.find(t.entries_[i].term);
            if (it == embeddings->vectors.end()) continue;
            std::copy(it->second.begin(), it->second.end(), t.vectors_.begin() + static_cast<std::ptrdiff_t>(i * d));
            double sq = 0.0;
            for (double v : it->second) sq += v * v;
            norm_sum += std::sqrt(sq);
            have[i] = true;
            ++t.loaded_;
        }
    }
    const double target_norm = t.loaded_ ? norm_sum / static_cast<double>(t.loaded_) : 1.0;
    for (std::size_t i = 1; i < t.entries_.size(); ++i) {
        if (have[i]) continue;
        Rng rng(splitmix64(fnv1a64(t.entries_[i].term) ^ options.seed));
        double sq = 0.0;
        double* v = t.vectors_.data() + i * d;
        for (std::size_t k = 0; k < d; ++k) {
            v[k] = rng.normal();
            sq += v[k] * v[k];
        }
        const double f = target_norm / std::sqrt(sq);
        for (std::size_t k = 0; k < d; ++k) v[k] *= f;
    }
    return t;
}

TermId TermTable::id(std::string_view token) const {
    auto it = ids_.find(std::string(token));
    return it == ids_.end() ? kUnknownTerm : it->second;
}

std::vector<TermId> TermTable::encode(std::span<const std::string> tokens) const {
    std::vector<TermId> out;
    out.reserve(tokens.size());
    for (const auto& t : tokens) out.push_back(id(t));
    return out;
}

std::span<const double> TermTable::embedding(TermId id) const {
    if (id >= entries_.size()) throw ArgumentError("TermTable: term id out of range");
    return {vectors_.data() + static_cast<std::size_t>(id) * dimension_, dimension_};
}

ad::Array TermTable::embed(std::span<const TermId> ids) const {
    ad::Array out(ids.size(), dimension_);
    for (std::size_t i = 0; i < ids.size(); ++i) {
        const auto e = embedding(ids[i]);
        std::copy(e.begin(), e.end(), out.row_span(i).begin());
    }
    return out;
}

} // namespace jrank::text
