#include "jrank/data/corpus.hpp"

#include "jrank/error.hpp"

#include <unordered_set>

namespace jrank::data {

std::size_t Document::token_count() const { return terms.size(); }

namespace {

Sentence make_sentence(const std::string& text, text::CharSpan span) {
    Sentence s;
    s.span = span;
    const std::string_view view(text.data() + span.begin, span.end - span.begin);
    s.tokens = text::tokenize(view);
    s.char_length = text::char_length(view);
    return s;
}

} // namespace

Corpus Corpus::from_records(const std::vector<CorpusRecord>& records, const text::WordList& abbreviations) {
    Corpus c;
    c.docs_.reserve(records.size());
    for (const auto& r : records) {
        if (r.id.empty()) throw DataError("corpus record with empty id");
        if (r.body.empty()) throw DataError("document " + r.id + " has an empty body");
        if (c.by_id_.count(r.id)) throw DataError("duplicate document id: " + r.id);
        Document d;
        d.id = r.id;
        std::size_t offset = 0;
        if (!r.title.empty()) {
            d.text = r.title + " ";
            d.sentences.push_back(make_sentence(d.text, {0, r.title.size()}));
            offset = d.text.size();
        }
        d.text += r.body;
        if (r.sentences) {
            std::size_t cursor = 0;
            for (const auto& s : *r.sentences) {
                if (s.empty()) continue;
                const std::size_t at = r.body.find(s, cursor);
                if (at == std::string::npos)
                    throw FormatError("corpus", 0, "document " + r.id + ": sentence not found in body: " + s);
                d.sentences.push_back(make_sentence(d.text, {offset + at, offset + at + s.size()}));
                cursor = at + s.size();
            }
        } else {
            for (const auto& span : text::split_sentences(r.body, abbreviations))
                d.sentences.push_back(make_sentence(d.text, {offset + span.begin, offset + span.end}));
        }
        c.by_id_.emplace(d.id, static_cast<DocNo>(c.docs_.size()));
        c.docs_.push_back(std::move(d));
    }
    return c;
}

void Corpus::encode(const text::TermTable& table) {
    for (auto& d : docs_) {
        d.terms.clear();
        for (auto& s : d.sentences) {
            s.terms = table.encode(s.tokens);
            d.terms.insert(d.terms.end(), s.terms.begin(), s.terms.end());
        }
    }
}

std::vector<std::vector<std::string>> Corpus::token_lists() const {
    std::vector<std::vector<std::string>> out;
    out.reserve(docs_.size());
    for (const auto& d : docs_) {
        std::vector<std::string> toks;
        for (const auto& s : d.sentences) toks.insert(toks.end(), s.tokens.begin(), s.tokens.end());
        out.push_back(std::move(toks));
    }
    return out;
}

std::optional<DocNo> Corpus::find(const std::string& id) const {
    auto it = by_id_.find(id);
    if (it == by_id_.end()) return std::nullopt;
    return it->second;
}

std::vector<std::string> Corpus::ids() const {
    std::vector<std::string> out;
    out.reserve(docs_.size());
    for (const auto& d : docs_) out.push_back(d.id);
    return out;
}

std::vector<std::vector<TermId>> Corpus::term_lists() const {
    std::vector<std::vector<TermId>> out;
    out.reserve(docs_.size());
    for (const auto& d : docs_) out.push_back(d.terms);
    return out;
}

std::vector<Question> resolve_questions(const std::vector<QuestionRecord>& records, const Corpus& corpus,
                                        const std::vector<std::size_t>* lines, const std::string& source) {
    std::vector<Question> out;
    out.reserve(records.size());
    std::unordered_set<std::string> seen;
    for (std::size_t i = 0; i < records.size(); ++i) {
        const auto& r = records[i];
        const std::string where =
            source + (lines && i < lines->size() ? ":" + std::to_string((*lines)[i]) : std::string()) +
            ": question " + r.id + ": ";
        if (r.id.empty()) throw DataError(where + "empty id");
        if (!seen.insert(r.id).second) throw DataError(where + "duplicate question id");
        Question q;
        q.id = r.id;
        q.text = r.text;
        q.tokens = text::tokenize(r.text);
        q.char_length = text::char_length(r.text);
        auto lookup = [&](const std::string& doc) {
            auto d = corpus.find(doc);
            if (!d) throw DataError(where + "gold document " + doc + " not in corpus");
            return *d;
        };
        for (const auto& doc : r.gold_docs) q.gold_docs.insert(lookup(doc));
        auto require_gold = [&](DocNo d, const std::string& doc) {
            if (!q.gold_docs.count(d)) throw DataError(where + "snippet in " + doc + " which is not a gold document");
        };
        for (const auto& gs : r.gold_sentences) {
            const DocNo d = lookup(gs.doc);
            require_gold(d, gs.doc);
            if (gs.sentence >= corpus[d].sentences.size())
                throw DataError(where + "sentence " + std::to_string(gs.sentence) + " out of range for " + gs.doc);
            q.gold_snippets.insert({d, gs.sentence});
        }
        for (const auto& span : r.gold_spans) {
            const DocNo d = lookup(span.doc);
            require_gold(d, span.doc);
            if (span.end <= span.begin) throw DataError(where + "empty gold span in " + span.doc);
            const text::CharSpan cs{span.begin, span.end};
            const auto& sents = corpus[d].sentences;
            for (std::uint32_t s = 0; s < sents.size(); ++s)
                if (sents[s].span.overlaps(cs)) q.gold_snippets.insert({d, s});
        }
        out.push_back(std::move(q));
    }
    return out;
}

void encode_questions(std::vector<Question>& questions, const text::TermTable& table) {
    for (auto& q : questions) q.terms = table.encode(q.tokens);
}

void SplitSpec::validate(const std::vector<Question>& questions) const {
    std::unordered_set<std::string> known;
    for (const auto& q : questions) known.insert(q.id);
    std::unordered_set<std::string> used;
    for (const auto* list : {&train, &dev, &test})
        for (const auto& id : *list) {
            if (!known.count(id)) throw DataError("split names unknown question " + id);
            if (!used.insert(id).second) throw DataError("question " + id + " appears in more than one split");
        }
}

std::vector<Question> select(const std::vector<Question>& questions, const std::vector<std::string>& ids) {
    std::unordered_map<std::string, std::size_t> pos;
    for (std::size_t i = 0; i < questions.size(); ++i) pos.emplace(questions[i].id, i);
    std::vector<Question> out;
    out.reserve(ids.size());
    for (const auto& id : ids) {
        auto it = pos.find(id);
        if (it == pos.end()) throw DataError("unknown question id " + id);
        out.push_back(questions[it->second]);
    }
    return out;
}

} // namespace jrank::data
