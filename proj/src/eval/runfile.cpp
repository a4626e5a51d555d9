#include "jrank/eval/runfile.hpp"

#include "jrank/error.hpp"

#include <json.hpp>

#include <charconv>
#include <fstream>
#include <map>
#include <sstream>

namespace jrank::eval {

std::string snippet_id(const std::string& doc_id, std::uint32_t sentence) {
    return doc_id + ":" + std::to_string(sentence);
}

void write_run(std::ostream& out, const std::vector<RunLine>& lines) {
    char score[32];
    for (const auto& l : lines) {
        // Shortest text that reads back to the same double.
        const auto r = std::to_chars(score, score + sizeof score, l.score);
        out << l.query_id << '\t' << l.rank << '\t' << l.id << '\t' << std::string_view(score, r.ptr - score) << '\t'
            << l.tag << '\n';
    }
}

void write_run(const std::string& path, const std::vector<RunLine>& lines) {
    std::ofstream out(path, std::ios::binary | std::ios::trunc);
    if (!out) throw IoError("cannot write " + path);
    write_run(out, lines);
}

std::vector<RunLine> read_run(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw IoError("cannot open " + path);
    std::vector<RunLine> out;
    std::string line;
    std::size_t n = 0;
    while (std::getline(in, line)) {
        ++n;
        if (!line.empty() && line.back() == '\r') line.pop_back();
        if (line.empty()) continue;
        std::vector<std::string> f;
        std::stringstream ss(line);
        std::string field;
        while (std::getline(ss, field, '\t')) f.push_back(field);
        if (f.size() != 5) throw FormatError(path, n, "expected 5 tab-separated fields, got " + std::to_string(f.size()));
        RunLine r;
        r.query_id = f[0];
        r.id = f[2];
        r.tag = f[4];
        auto [p, ec] = std::from_chars(f[1].data(), f[1].data() + f[1].size(), r.rank);
        if (ec != std::errc() || p != f[1].data() + f[1].size() || r.rank == 0)
            throw FormatError(path, n, "bad rank '" + f[1] + "'");
        try {
            std::size_t used = 0;
            r.score = std::stod(f[3], &used);
            if (used != f[3].size()) throw std::invalid_argument("trailing");
        } catch (const std::exception&) {
            throw FormatError(path, n, "bad score '" + f[3] + "'");
        }
        out.push_back(std::move(r));
    }
    return out;
}

std::vector<QueryResult> group_runs(const std::vector<RunLine>& docs, const std::vector<RunLine>& snippets) {
    std::map<std::string, std::pair<std::vector<const RunLine*>, std::vector<const RunLine*>>> by_query;
    for (const auto& l : docs) by_query[l.query_id].first.push_back(&l);
    for (const auto& l : snippets) by_query[l.query_id].second.push_back(&l);
    auto ordered = [](std::vector<const RunLine*> v) {
        std::stable_sort(v.begin(), v.end(), [](auto* a, auto* b) { return a->rank < b->rank; });
        std::vector<std::string> ids;
        for (auto* l : v) ids.push_back(l->id);
        return ids;
    };
    std::vector<QueryResult> out;
    for (auto& [qid, lists] : by_query) out.push_back({qid, ordered(lists.first), ordered(lists.second)});
    return out;
}

namespace {

nlohmann::json level_json(const LevelMetrics& m, const EvalOptions& o) {
    nlohmann::json j = {{"has_gold", m.has_gold}, {"ap", m.ap}, {"rr", m.rr}};
    for (std::size_t i = 0; i < o.recall_ks.size(); ++i) j["recall@" + std::to_string(o.recall_ks[i])] = m.recall[i];
    return j;
}

nlohmann::json summary_json(const LevelSummary& s, const EvalOptions& o) {
    nlohmann::json j = {{"map", s.map}, {"mrr", s.mrr}, {"evaluated", s.evaluated}, {"excluded", s.excluded}};
    for (std::size_t i = 0; i < o.recall_ks.size(); ++i) j["recall@" + std::to_string(o.recall_ks[i])] = s.recall[i];
    return j;
}

} // namespace

void write_report(std::ostream& out, const EvalReport& r) {
    for (const auto& q : r.queries)
        out << nlohmann::json{{"query", q.query_id},
                              {"docs", level_json(q.docs, r.options)},
                              {"snippets", level_json(q.snippets, r.options)}}
                   .dump()
            << '\n';
    out << nlohmann::json{{"summary", true},
                          {"queries", r.queries.size()},
                          {"cutoff", r.options.cutoff},
                          {"ap_denominator", to_string(r.options.ap)},
                          {"docs", summary_json(r.docs, r.options)},
                          {"snippets", summary_json(r.snippets, r.options)}}
               .dump()
        << '\n';
}

void write_report(const std::string& path, const EvalReport& report) {
    std::ofstream out(path, std::ios::binary | std::ios::trunc);
    if (!out) throw IoError("cannot write " + path);
    write_report(out, report);
}

} // namespace jrank::eval
