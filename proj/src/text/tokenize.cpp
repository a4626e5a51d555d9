#include "jrank/text/tokenize.hpp"

#include "jrank/error.hpp"

#include <fstream>

namespace jrank::text {
namespace {

bool is_token_byte(unsigned char c) {
    return (c >= '0' && c <= '9') || (c >= 'a' && c <= 'z') || (c >= 'A' && c <= 'Z') || c >= 0x80;
}

bool is_space(unsigned char c) {
    return c == ' ' || c == '\t' || c == '\n' || c == '\r' || c == '\f' || c == '\v';
}

bool is_closer(unsigned char c) { return c == '"' || c == '\'' || c == ')' || c == ']'; }

} // namespace

std::vector<std::string> tokenize(std::string_view text) {
    std::vector<std::string> out;
    std::string cur;
    for (unsigned char c : text) {
        if (is_token_byte(c)) {
            cur.push_back(c >= 'A' && c <= 'Z' ? static_cast<char>(c - 'A' + 'a') : static_cast<char>(c));
        } else if (!cur.empty()) {
            out.push_back(std::move(cur));
            cur.clear();
        }
    }
    if (!cur.empty()) out.push_back(std::move(cur));
    return out;
}

std::size_t char_length(std::string_view text) {
    std::size_t n = 0;
    for (unsigned char c : text)
        if ((c & 0xC0) != 0x80) ++n;
    return n;
}

const WordList& default_stopwords() {
    static const WordList words = {
        "a", "about", "above", "after", "again", "against", "all", "am", "an", "and", "any", "are",
        "as", "at", "be", "because", "been", "before", "being", "below", "between", "both", "but",
        "by", "can", "could", "did", "do", "does", "doing", "down", "during", "each", "few", "for",
        "from", "further", "had", "has", "have", "having", "he", "her", "here", "hers", "herself",
        "him", "himself", "his", "how", "i", "if", "in", "into", "is", "it", "its", "itself",
        "just", "me", "more", "most", "my", "myself", "no", "nor", "not", "now", "of", "off", "on",
        "once", "only", "or", "other", "our", "ours", "ourselves", "out", "over", "own", "same",
        "she", "should", "so", "some", "such", "than", "that", "the", "their", "theirs", "them",
        "themselves", "then", "there", "these", "they", "this", "those", "through", "to", "too",
        "under", "until", "up", "very", "was", "we", "were", "what", "when", "where", "which",
        "while", "who", "whom", "why", "will", "with", "would", "you", "your", "yours", "yourself",
        "yourselves"};
    return words;
}

const WordList& default_abbreviations() {
    static const WordList words = [] {
        WordList w = {"e.g.", "i.e.", "etc.", "vs.", "al.", "Dr.", "Mr.", "Mrs.", "Ms.", "Prof.",
                      "Fig.", "fig.", "Figs.", "No.", "no.", "approx.", "ca.", "cf.", "Eq.", "St.",
                      "Jr.", "Sr.", "Inc.", "Ltd.", "Co.", "sp.", "spp."};
        for (char c = 'A'; c <= 'Z'; ++c) w.insert(std::string(1, c) + ".");
        return w;
    }();
    return words;
}

WordList load_word_list(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw IoError("cannot open word list: " + path);
    WordList out;
    std::string line;
    while (std::getline(in, line)) {
        while (!line.empty() && is_space(static_cast<unsigned char>(line.back()))) line.pop_back();
        std::size_t b = 0;
        while (b < line.size() && is_space(static_cast<unsigned char>(line[b]))) ++b;
        if (b == line.size() || line[b] == '#') continue;
        out.insert(line.substr(b));
    }
    return out;
}

std::vector<CharSpan> split_sentences(std::string_view text, const WordList& abbreviations) {
    std::vector<CharSpan> spans;
    const std::size_t n = text.size();
    std::size_t start = 0;
    auto emit = [&](std::size_t end) {
        std::size_t b = start;
        while (b < end && is_space(static_cast<unsigned char>(text[b]))) ++b;
        std::size_t e = end;
        while (e > b && is_space(static_cast<unsigned char>(text[e - 1]))) --e;
        if (e > b) spans.push_back({b, e});
        start = end;
    };

    for (std::size_t i = 0; i < n; ++i) {
        const char c = text[i];
        if (c != '.' && c != '?' && c != '!') continue;
        std::size_t j = i + 1;
        while (j < n && is_closer(static_cast<unsigned char>(text[j]))) ++j;
        if (j >= n || !is_space(static_cast<unsigned char>(text[j]))) continue;
        std::size_t k = j;
        while (k < n && is_space(static_cast<unsigned char>(text[k]))) ++k;
        if (k >= n) continue;
        const unsigned char next = static_cast<unsigned char>(text[k]);
        if (!((next >= 'A' && next <= 'Z') || (next >= '0' && next <= '9'))) continue;
        if (c == '.') {
            std::size_t w = i;
            while (w > 0 && !is_space(static_cast<unsigned char>(text[w - 1]))) --w;
            if (abbreviations.count(std::string(text.substr(w, i + 1 - w)))) continue;
        }
        emit(j);
        i = j - 1;
    }
    emit(n);
    return spans;
}

} // namespace jrank::text
