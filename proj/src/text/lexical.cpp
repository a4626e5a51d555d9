#include "jrank/text/lexical.hpp"

namespace jrank::text {

std::unordered_set<std::uint64_t> bigrams(std::span<const TermId> tokens) {
    std::unordered_set<std::uint64_t> out;
    for (std::size_t i = 1; i < tokens.size(); ++i)
        out.insert((static_cast<std::uint64_t>(tokens[i - 1]) << 32) | tokens[i]);
    return out;
}

std::vector<TermId> distinct_terms(std::span<const TermId> tokens) {
    std::vector<TermId> out;
    std::unordered_set<TermId> seen;
    for (TermId t : tokens)
        if (seen.insert(t).second) out.push_back(t);
    return out;
}

LexicalOverlap lexical_overlap(std::span<const TermId> query, std::span<const TermId> text,
                               const TermTable& table) {
    LexicalOverlap f;
    const std::unordered_set<TermId> in_text(text.begin(), text.end());
    double query_idf = 0.0;
    for (TermId t : distinct_terms(query)) {
        const double idf = table.idf(t);
        query_idf += idf;
        if (!in_text.count(t)) continue;
        f.shared_tokens += 1.0;
        f.shared_idf += idf;
        if (!table.is_stopword(t)) {
            f.shared_tokens_no_stop += 1.0;
            f.shared_idf_no_stop += idf;
        }
    }
    f.idf_share = query_idf > 0.0 ? f.shared_idf / query_idf : 0.0;
    const auto text_bigrams = bigrams(text);
    for (std::uint64_t bg : bigrams(query))
        if (text_bigrams.count(bg)) f.shared_bigrams += 1.0;
    return f;
}

} // namespace jrank::text
