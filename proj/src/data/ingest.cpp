#include "jrank/data/ingest.hpp"

#include "jrank/error.hpp"

#include <json.hpp>

#include <fstream>

namespace jrank::data {

using nlohmann::json;

namespace {

std::ifstream open_in(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw IoError("cannot open " + path);
    return in;
}

std::ofstream open_out(const std::string& path) {
    std::ofstream out(path, std::ios::binary | std::ios::trunc);
    if (!out) throw IoError("cannot write " + path);
    return out;
}

// Calls fn(object, line) for every non-blank line.
template <typename Fn>
void for_each_record(const std::string& path, Fn fn) {
    auto in = open_in(path);
    std::string line;
    std::size_t n = 0;
    while (std::getline(in, line)) {
        ++n;
        if (line.find_first_not_of(" \t\r") == std::string::npos) continue;
        json j;
        try {
            j = json::parse(line);
        } catch (const json::exception& e) {
            throw FormatError(path, n, std::string("invalid JSON: ") + e.what());
        }
        if (!j.is_object()) throw FormatError(path, n, "record is not an object");
        try {
            fn(j, n);
        } catch (const json::exception& e) {
            throw FormatError(path, n, e.what());
        }
    }
}

std::string required_string(const json& j, const char* key, const std::string& path, std::size_t line) {
    auto it = j.find(key);
    if (it == j.end() || !it->is_string()) throw FormatError(path, line, std::string("missing string field '") + key + "'");
    return it->get<std::string>();
}

std::size_t required_index(const json& j, const char* key, const std::string& path, std::size_t line) {
    auto it = j.find(key);
    if (it == j.end() || !it->is_number_unsigned())
        throw FormatError(path, line, std::string("missing non-negative integer field '") + key + "'");
    return it->get<std::size_t>();
}

void write_line(std::ofstream& out, const json& j) { out << j.dump() << '\n'; }

} // namespace

Lines<CorpusRecord> read_corpus(const std::string& path) {
    Lines<CorpusRecord> out;
    for_each_record(path, [&](const json& j, std::size_t line) {
        CorpusRecord r;
        r.id = required_string(j, "id", path, line);
        r.body = required_string(j, "body", path, line);
        if (r.id.empty()) throw FormatError(path, line, "empty id");
        if (r.body.empty()) throw FormatError(path, line, "empty body");
        if (auto t = j.find("title"); t != j.end() && !t->is_null()) {
            if (!t->is_string()) throw FormatError(path, line, "'title' is not a string");
            r.title = t->get<std::string>();
        }
        if (auto s = j.find("sentences"); s != j.end() && !s->is_null()) {
            if (!s->is_array()) throw FormatError(path, line, "'sentences' is not an array");
            r.sentences = s->get<std::vector<std::string>>();
        }
        out.records.push_back(std::move(r));
        out.lines.push_back(line);
    });
    return out;
}

void write_corpus(const std::string& path, const std::vector<CorpusRecord>& records) {
    auto out = open_out(path);
    for (const auto& r : records) {
        json j = {{"id", r.id}, {"title", r.title}, {"body", r.body}};
        if (r.sentences) j["sentences"] = *r.sentences;
        write_line(out, j);
    }
}

Lines<QuestionRecord> read_questions(const std::string& path) {
    Lines<QuestionRecord> out;
    for_each_record(path, [&](const json& j, std::size_t line) {
        QuestionRecord r;
        r.id = required_string(j, "id", path, line);
        r.text = required_string(j, "text", path, line);
        if (auto g = j.find("gold_docs"); g != j.end()) r.gold_docs = g->get<std::vector<std::string>>();
        if (auto g = j.find("gold_snippets"); g != j.end()) {
            if (!g->is_array()) throw FormatError(path, line, "'gold_snippets' is not an array");
            for (const auto& s : *g) {
                if (!s.is_object()) throw FormatError(path, line, "gold snippet is not an object");
                const std::string doc = required_string(s, "doc", path, line);
                if (s.contains("sentence")) {
                    r.gold_sentences.push_back(
                        {doc, static_cast<std::uint32_t>(required_index(s, "sentence", path, line))});
                } else {
                    r.gold_spans.push_back(
                        {doc, required_index(s, "begin", path, line), required_index(s, "end", path, line)});
                }
            }
        }
        out.records.push_back(std::move(r));
        out.lines.push_back(line);
    });
    return out;
}

void write_questions(const std::string& path, const std::vector<QuestionRecord>& records) {
    auto out = open_out(path);
    for (const auto& r : records) {
        json snippets = json::array();
        for (const auto& s : r.gold_sentences) snippets.push_back({{"doc", s.doc}, {"sentence", s.sentence}});
        for (const auto& s : r.gold_spans) snippets.push_back({{"doc", s.doc}, {"begin", s.begin}, {"end", s.end}});
        write_line(out, {{"id", r.id}, {"text", r.text}, {"gold_docs", r.gold_docs}, {"gold_snippets", snippets}});
    }
}

SplitSpec read_split(const std::string& path) {
    auto in = open_in(path);
    json j;
    try {
        j = json::parse(in);
        SplitSpec s;
        s.seed = j.value("seed", std::uint64_t{0});
        s.train = j.value("train", std::vector<std::string>{});
        s.dev = j.value("dev", std::vector<std::string>{});
        s.test = j.value("test", std::vector<std::string>{});
        return s;
    } catch (const json::exception& e) {
        throw FormatError(path, 0, e.what());
    }
}

void write_split(const std::string& path, const SplitSpec& split) {
    auto out = open_out(path);
    out << json{{"seed", split.seed}, {"train", split.train}, {"dev", split.dev}, {"test", split.test}}.dump(1)
        << '\n';
}

Dataset ingest(const std::string& corpus_path, const std::string& questions_path,
               const text::WordList& abbreviations) {
    auto corpus_lines = read_corpus(corpus_path);
    Dataset d{Corpus::from_records(corpus_lines.records, abbreviations), {}};
    auto q = read_questions(questions_path);
    d.questions = resolve_questions(q.records, d.corpus, &q.lines, questions_path);
    return d;
}

} // namespace jrank::data
