#pragma once

#include <algorithm>
#include <cstddef>
#include <map>
#include <set>
#include <span>
#include <string>
#include <vector>

namespace jrank::eval {

/// classic: divide by |gold|. min-r-cutoff: divide by min(|gold|, cutoff).
enum class ApDenominator { classic, min_r_cutoff };

std::string to_string(ApDenominator mode);
ApDenominator parse_ap_denominator(const std::string& name);

/// Throws ArgumentError if an id occurs twice.
void require_unique(std::span<const std::string> ranked);

/// (1/R) * sum over ranks i <= cutoff holding a gold item of precision@i.
/// Returns 0 when the gold set is empty.
double average_precision(std::span<const std::string> ranked, const std::set<std::string>& gold,
                         std::size_t cutoff, ApDenominator mode = ApDenominator::classic);
/// 1 / rank of the first gold item, 0 if none.
double reciprocal_rank(std::span<const std::string> ranked, const std::set<std::string>& gold);
/// |gold ∩ top-k| / |gold|; 0 when the gold set is empty.
double recall_at(std::span<const std::string> ranked, const std::set<std::string>& gold, std::size_t k);

/// Gold candidates first, each group in its original order.
template <typename T, typename IsGold>
std::vector<T> oracle_rerank(std::vector<T> candidates, IsGold is_gold) {
    std::stable_partition(candidates.begin(), candidates.end(), is_gold);
    return candidates;
}
std::vector<std::string> oracle_rerank(std::vector<std::string> candidates, const std::set<std::string>& gold);

/// Ranked output of one query; sentence ids are "docid:index".
struct QueryResult {
    std::string query_id;
    std::vector<std::string> docs;
    std::vector<std::string> snippets;
};

struct GoldSets {
    std::set<std::string> docs;
    std::set<std::string> snippets;
};

struct EvalOptions {
    std::size_t cutoff = 10;
    ApDenominator ap = ApDenominator::classic;
    std::vector<std::size_t> recall_ks = {1, 2, 10};
};

struct LevelMetrics {
    bool has_gold = false;
    double ap = 0.0;
    double rr = 0.0;
    std::vector<double> recall; // aligned with EvalOptions::recall_ks
};

struct QueryMetrics {
    std::string query_id;
    LevelMetrics docs;
    LevelMetrics snippets;
};

/// Macro averages over queries with at least one gold item.
struct LevelSummary {
    double map = 0.0;
    double mrr = 0.0;
    std::vector<double> recall;
    std::size_t evaluated = 0;
    std::size_t excluded = 0;
};

struct EvalReport {
    EvalOptions options;
    std::vector<QueryMetrics> queries; // by query id
    LevelSummary docs;
    LevelSummary snippets;
};

/// Evaluates every query of `results`. Throws DataError for a query missing
/// from `gold`, ArgumentError for duplicate ids within a list.
EvalReport evaluate(const std::vector<QueryResult>& results, const std::map<std::string, GoldSets>& gold,
                    const EvalOptions& options = {});

/// Per-query values of one metric, for significance testing. `metric` is
/// "ap" or "rr"; `level` is "docs" or "snippets". Queries without gold are skipped.
std::vector<double> per_query(const EvalReport& report, const std::string& level, const std::string& metric);

} // namespace jrank::eval
