#pragma once

#include "jrank/eval/metrics.hpp"
#include "jrank/model/rank.hpp"
#include "jrank/train/checkpoint.hpp"
#include "jrank/train/triples.hpp"

#include <iosfwd>
#include <span>
#include <vector>

namespace jrank::train {

struct TrainConfig {
    model::ModelConfig model;
    std::size_t batch_size = 32;
    double learning_rate = 1e-3;
    std::size_t patience = 5;
    std::size_t max_epochs = 50;
    double clip_norm = 5.0;
    std::uint64_t seed = 0;
    model::RankLimits limits;
    eval::ApDenominator ap = eval::ApDenominator::classic;
    std::size_t jobs = 1;

    void validate() const;
};

struct EpochRecord {
    std::size_t epoch = 0;
    std::size_t triples = 0;
    double train_loss = 0.0;
    double dev_metric = 0.0;
    bool improved = false;
};

struct TrainResult {
    model::Model model; // parameters of the best dev epoch, rounded to float32
    std::vector<EpochRecord> history;
    CheckpointMeta meta;
};

/// Metric used for early stopping: document MAP for doc-pdrmm, snippet MAP otherwise.
std::string dev_metric_name(model::ModelKind kind);

/// Ranks prepared queries with `rank` (spread over `jobs` threads) and
/// evaluates them against the queries' own gold sets. Ids in the result are
/// DocNo values and "DocNo:sentence".
eval::EvalReport evaluate_prepared(
    std::span<const model::PreparedQuery> queries,
    const std::function<model::Ranking(const model::PreparedQuery&)>& rank, const eval::EvalOptions& options,
    std::size_t jobs = 1);

/// The dev metric of a model: doc-pdrmm ranks documents; sent-pdrmm ranks
/// with documents inheriting their best sentence; joint ranks jointly.
double dev_metric(const model::Model& model, std::span<const model::PreparedQuery> dev,
                  const text::TermTable& table, const model::RankLimits& limits, eval::ApDenominator ap,
                  std::size_t jobs = 1);

/// Trains with Adam on per-epoch resampled triples, evaluates on `dev` after
/// every epoch and keeps the best epoch. Stops after `patience` epochs without
/// improvement or at `max_epochs`. Writes one JSON line per epoch to `log`.
/// Throws ArgumentError when there are no triples or no dev queries, and
/// NumericError naming the epoch and batch on a non-finite loss.
TrainResult train(const TrainConfig& config, std::span<const model::PreparedQuery> train_queries,
                  std::span<const model::PreparedQuery> dev_queries, const text::TermTable& table,
                  std::ostream* log = nullptr);

} // namespace jrank::train
