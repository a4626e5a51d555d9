#pragma once

#include "jrank/eval/metrics.hpp"

#include <iosfwd>
#include <string>
#include <vector>

namespace jrank::eval {

/// One line of a run file, tab separated:
///   query-id  rank  id  score  run-tag
/// Ranks start at 1. Document ids are corpus ids; sentence ids are "docid:index".
struct RunLine {
    std::string query_id;
    std::size_t rank = 0;
    std::string id;
    double score = 0.0;
    std::string tag;
};

std::string snippet_id(const std::string& doc_id, std::uint32_t sentence);

void write_run(std::ostream& out, const std::vector<RunLine>& lines);
void write_run(const std::string& path, const std::vector<RunLine>& lines);
/// Throws FormatError with the line number on malformed lines.
std::vector<RunLine> read_run(const std::string& path);

/// Groups document and snippet run lines into per-query results ordered by
/// rank. Queries present in only one file get an empty other list.
std::vector<QueryResult> group_runs(const std::vector<RunLine>& docs, const std::vector<RunLine>& snippets);

/// One JSON object per query, then one summary object.
void write_report(std::ostream& out, const EvalReport& report);
void write_report(const std::string& path, const EvalReport& report);

} // namespace jrank::eval
