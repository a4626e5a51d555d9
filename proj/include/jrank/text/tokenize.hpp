#pragma once

#include <cstddef>
#include <string>
#include <string_view>
#include <unordered_set>
#include <vector>

namespace jrank::text {

/// Lowercased alphanumeric tokens. Bytes >= 0x80 count as token characters so
/// UTF-8 words stay whole; every other non-alphanumeric byte separates tokens.
std::vector<std::string> tokenize(std::string_view text);

/// Number of UTF-8 code points.
std::size_t char_length(std::string_view text);

/// Byte offsets [begin, end) into the text a span was taken from.
struct CharSpan {
    std::size_t begin = 0;
    std::size_t end = 0;

    bool overlaps(const CharSpan& o) const noexcept { return begin < o.end && o.begin < end; }
    friend bool operator==(const CharSpan&, const CharSpan&) = default;
};

using WordList = std::unordered_set<std::string>;

/// Bundled English stopword list.
const WordList& default_stopwords();
/// Bundled abbreviation guards, e.g. "e.g.", "Dr.", single capitals "E.".
const WordList& default_abbreviations();
/// Newline-delimited UTF-8 word list; blank lines and lines starting with '#' skipped.
WordList load_word_list(const std::string& path);

/// Splits at '.', '?' or '!' (optionally followed by closing quotes or
/// brackets) when followed by whitespace and then an uppercase letter or a
/// digit, unless the word ending at the '.' is an abbreviation. Spans are
/// trimmed, ordered and together cover all non-whitespace text.
std::vector<CharSpan> split_sentences(std::string_view text,
                                      const WordList& abbreviations = default_abbreviations());

} // namespace jrank::text
