#include "jrank/eval/metrics.hpp"

#include "jrank/error.hpp"

#include <unordered_set>

namespace jrank::eval {

std::string to_string(ApDenominator mode) { return mode == ApDenominator::classic ? "classic" : "min-r-cutoff"; }

ApDenominator parse_ap_denominator(const std::string& name) {
    if (name == "classic") return ApDenominator::classic;
    if (name == "min-r-cutoff") return ApDenominator::min_r_cutoff;
    throw ArgumentError("unknown AP denominator '" + name + "' (expected classic or min-r-cutoff)");
}

void require_unique(std::span<const std::string> ranked) {
    std::unordered_set<std::string> seen;
    for (const auto& id : ranked)
        if (!seen.insert(id).second) throw ArgumentError("duplicate id in ranking: " + id);
}

double average_precision(std::span<const std::string> ranked, const std::set<std::string>& gold,
                         std::size_t cutoff, ApDenominator mode) {
    if (cutoff == 0) throw ArgumentError("average_precision: cutoff must be at least 1");
    require_unique(ranked);
    if (gold.empty()) return 0.0;
    double sum = 0.0;
    std::size_t hits = 0;
    const std::size_t n = std::min(cutoff, ranked.size());
    for (std::size_t i = 0; i < n; ++i) {
        if (!gold.count(ranked[i])) continue;
        ++hits;
        sum += static_cast<double>(hits) / static_cast<double>(i + 1);
    }
    const std::size_t r = mode == ApDenominator::classic ? gold.size() : std::min(gold.size(), cutoff);
    return sum / static_cast<double>(r);
}

double reciprocal_rank(std::span<const std::string> ranked, const std::set<std::string>& gold) {
    require_unique(ranked);
    for (std::size_t i = 0; i < ranked.size(); ++i)
        if (gold.count(ranked[i])) return 1.0 / static_cast<double>(i + 1);
    return 0.0;
}

double recall_at(std::span<const std::string> ranked, const std::set<std::string>& gold, std::size_t k) {
    if (k == 0) throw ArgumentError("recall_at: k must be at least 1");
    require_unique(ranked);
    if (gold.empty()) return 0.0;
    std::size_t hits = 0;
    for (std::size_t i = 0; i < std::min(k, ranked.size()); ++i) hits += gold.count(ranked[i]);
    return static_cast<double>(hits) / static_cast<double>(gold.size());
}

std::vector<std::string> oracle_rerank(std::vector<std::string> candidates, const std::set<std::string>& gold) {
    return oracle_rerank(std::move(candidates), [&](const std::string& id) { return gold.count(id) != 0; });
}

namespace {

LevelMetrics measure(const std::vector<std::string>& ranked, const std::set<std::string>& gold,
                     const EvalOptions& o) {
    LevelMetrics m;
    require_unique(ranked);
    m.has_gold = !gold.empty();
    m.ap = average_precision(ranked, gold, o.cutoff, o.ap);
    m.rr = reciprocal_rank(ranked, gold);
    for (std::size_t k : o.recall_ks) m.recall.push_back(recall_at(ranked, gold, k));
    return m;
}

LevelSummary summarize(const std::vector<QueryMetrics>& qs, LevelMetrics QueryMetrics::*level, std::size_t ks) {
    LevelSummary s;
    s.recall.assign(ks, 0.0);
    for (const auto& q : qs) {
        const auto& m = q.*level;
        if (!m.has_gold) {
            ++s.excluded;
            continue;
        }
        ++s.evaluated;
        s.map += m.ap;
        s.mrr += m.rr;
        for (std::size_t i = 0; i < ks; ++i) s.recall[i] += m.recall[i];
    }
    if (s.evaluated) {
        const double n = static_cast<double>(s.evaluated);
        s.map /= n;
        s.mrr /= n;
        for (double& r : s.recall) r /= n;
    }
    return s;
}

} // namespace

EvalReport evaluate(const std::vector<QueryResult>& results, const std::map<std::string, GoldSets>& gold,
                    const EvalOptions& options) {
    if (options.cutoff == 0) throw ArgumentError("evaluate: cutoff must be at least 1");
    EvalReport r;
    r.options = options;
    for (const auto& q : results) {
        auto it = gold.find(q.query_id);
        if (it == gold.end()) throw DataError("run holds query " + q.query_id + " which has no gold record");
        r.queries.push_back(
            {q.query_id, measure(q.docs, it->second.docs, options), measure(q.snippets, it->second.snippets, options)});
    }
    std::sort(r.queries.begin(), r.queries.end(),
              [](const QueryMetrics& a, const QueryMetrics& b) { return a.query_id < b.query_id; });
    for (std::size_t i = 1; i < r.queries.size(); ++i)
        if (r.queries[i].query_id == r.queries[i - 1].query_id)
            throw DataError("query " + r.queries[i].query_id + " appears twice in the run");
    r.docs = summarize(r.queries, &QueryMetrics::docs, options.recall_ks.size());
    r.snippets = summarize(r.queries, &QueryMetrics::snippets, options.recall_ks.size());
    return r;
}

std::vector<double> per_query(const EvalReport& report, const std::string& level, const std::string& metric) {
    if (level != "docs" && level != "snippets") throw ArgumentError("level must be docs or snippets");
    if (metric != "ap" && metric != "rr") throw ArgumentError("metric must be ap or rr");
    std::vector<double> out;
    for (const auto& q : report.queries) {
        const auto& m = level == "docs" ? q.docs : q.snippets;
        if (!m.has_gold) continue;
        out.push_back(metric == "ap" ? m.ap : m.rr);
    }
    return out;
}

} // namespace jrank::eval
