#include "jrank/data/nq.hpp"

#include "jrank/error.hpp"

#include <json.hpp>

#include <fstream>
#include <map>
#include <set>

namespace jrank::data {

using nlohmann::json;

namespace {

template <typename Fn>
void for_each_object(const std::string& path, Fn fn) {
    std::ifstream in(path);
    if (!in) throw IoError("cannot open " + path);
    std::string line;
    std::size_t n = 0;
    while (std::getline(in, line)) {
        ++n;
        if (line.find_first_not_of(" \t\r") == std::string::npos) continue;
        try {
            const json j = json::parse(line);
            if (!j.is_object()) throw FormatError(path, n, "record is not an object");
            fn(j, n);
        } catch (const json::exception& e) {
            throw FormatError(path, n, e.what());
        }
    }
}

ParagraphRef parse_ref(const json& j) {
    return {j.at("page").get<std::string>(), j.at("index").get<std::uint32_t>()};
}

} // namespace

std::string paragraph_doc_id(const std::string& page, std::uint32_t index) {
    return page + "_p" + std::to_string(index);
}

Lines<ParagraphRecord> read_paragraphs(const std::string& path) {
    Lines<ParagraphRecord> out;
    for_each_object(path, [&](const json& j, std::size_t line) {
        ParagraphRecord p;
        p.page = j.at("page").get<std::string>();
        p.index = j.at("index").get<std::uint32_t>();
        p.text = j.at("text").get<std::string>();
        p.is_table = j.value("is_table", false);
        out.records.push_back(std::move(p));
        out.lines.push_back(line);
    });
    return out;
}

Lines<NqAnnotation> read_annotations(const std::string& path) {
    Lines<NqAnnotation> out;
    for_each_object(path, [&](const json& j, std::size_t line) {
        NqAnnotation a;
        a.id = j.at("id").get<std::string>();
        a.question = j.at("question").get<std::string>();
        for (const auto& r : j.value("long_answers", json::array())) a.long_answers.push_back(parse_ref(r));
        for (const auto& s : j.value("short_answers", json::array())) {
            const auto ref = parse_ref(s);
            a.short_answers.push_back(
                {ref.page, ref.index, s.at("begin").get<std::size_t>(), s.at("end").get<std::size_t>()});
        }
        out.records.push_back(std::move(a));
        out.lines.push_back(line);
    });
    return out;
}

NqDataset convert_nq(const Lines<ParagraphRecord>& paragraphs, const Lines<NqAnnotation>& annotations,
                     const NqOptions& options, const text::WordList& abbreviations) {
    options.bm25.validate();
    if (options.top_n == 0) throw ArgumentError("top-N must be at least 1");

    NqDataset out;
    out.stats.paragraphs = paragraphs.records.size();
    std::map<std::string, bool> is_table; // doc id -> table flag, for every known paragraph
    std::set<std::string> blank;           // paragraphs with no text, never documents
    for (std::size_t i = 0; i < paragraphs.records.size(); ++i) {
        const auto& p = paragraphs.records[i];
        const std::string id = paragraph_doc_id(p.page, p.index);
        if (!is_table.emplace(id, p.is_table).second)
            throw DataError("paragraphs:" + std::to_string(paragraphs.lines[i]) + ": duplicate paragraph " + id);
        if (p.is_table) {
            ++out.stats.tables_dropped;
            continue;
        }
        if (p.text.find_first_not_of(" \t\r\n") == std::string::npos) {
            blank.insert(id);
            continue;
        }
        out.corpus.push_back({id, "", p.text, std::nullopt});
    }

    std::vector<QuestionRecord> candidates;
    out.stats.questions = annotations.records.size();
    for (std::size_t i = 0; i < annotations.records.size(); ++i) {
        const auto& a = annotations.records[i];
        const std::string where = "annotations:" + std::to_string(annotations.lines[i]) + ": question " + a.id + ": ";
        auto known = [&](const std::string& page, std::uint32_t index) {
            const std::string id = paragraph_doc_id(page, index);
            auto it = is_table.find(id);
            if (it == is_table.end()) throw DataError(where + "references missing paragraph " + id);
            return it;
        };
        bool table = false;
        QuestionRecord q;
        q.id = a.id;
        q.text = a.question;
        std::set<std::string> gold;
        for (const auto& r : a.long_answers) {
            auto it = known(r.page, r.index);
            table = table || it->second;
            if (blank.count(it->first)) continue;
            if (gold.insert(it->first).second) q.gold_docs.push_back(it->first);
        }
        for (const auto& s : a.short_answers) {
            auto it = known(s.page, s.index);
            table = table || it->second;
            if (blank.count(it->first)) continue;
            if (!gold.count(it->first)) throw DataError(where + "short answer outside the long answers");
            q.gold_spans.push_back({it->first, s.begin, s.end});
        }
        if (table) {
            ++out.stats.dropped_table_answer;
            continue;
        }
        if (q.gold_docs.empty()) {
            ++out.stats.dropped_no_long_answer;
            continue;
        }
        candidates.push_back(std::move(q));
    }

    // Retrieval filter over the converted paragraphs.
    Corpus corpus = Corpus::from_records(out.corpus, abbreviations);
    const auto tokens = corpus.token_lists();
    text::TermTableOptions topts;
    topts.dimension = 1;
    const auto table = text::TermTable::build(tokens, nullptr, topts);
    corpus.encode(table);
    const auto ids = corpus.ids();
    const auto index = index::InvertedIndex::build(ids, corpus.term_lists());
    for (auto& q : candidates) {
        const auto terms = table.encode(text::tokenize(q.text));
        const auto top = index.retrieve(terms, options.bm25, options.top_n);
        bool hit = false;
        for (const auto& c : top)
            for (const auto& g : q.gold_docs) hit = hit || corpus[c.doc].id == g;
        if (!hit) {
            ++out.stats.dropped_not_retrieved;
            continue;
        }
        out.questions.push_back(std::move(q));
    }
    out.stats.kept = out.questions.size();
    return out;
}

} // namespace jrank::data
