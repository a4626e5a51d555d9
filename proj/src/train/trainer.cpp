#include "jrank/train/trainer.hpp"

#include "jrank/ad/adam.hpp"
#include "jrank/ad/ops.hpp"
#include "jrank/error.hpp"
#include "jrank/rng.hpp"

#include <json.hpp>

#include <cmath>
#include <map>
#include <ostream>
#include <thread>

namespace jrank::train {

void TrainConfig::validate() const {
    model.validate();
    limits.validate();
    if (batch_size == 0) throw ArgumentError("batch size must be at least 1");
    if (!(learning_rate > 0.0)) throw ArgumentError("learning rate must be positive");
    if (max_epochs == 0) throw ArgumentError("max epochs must be at least 1");
    if (!(clip_norm > 0.0)) throw ArgumentError("clip norm must be positive");
}

std::string dev_metric_name(model::ModelKind kind) {
    return kind == model::ModelKind::doc_pdrmm ? "doc_map" : "snippet_map";
}

eval::EvalReport evaluate_prepared(std::span<const model::PreparedQuery> queries,
                                   const std::function<model::Ranking(const model::PreparedQuery&)>& rank,
                                   const eval::EvalOptions& options, std::size_t jobs) {
    std::vector<model::Ranking> rankings(queries.size());
    jobs = std::clamp<std::size_t>(jobs, 1, std::max<std::size_t>(queries.size(), 1));
    if (jobs == 1) {
        for (std::size_t i = 0; i < queries.size(); ++i) rankings[i] = rank(queries[i]);
    } else {
        std::vector<std::exception_ptr> errors(jobs);
        std::vector<std::thread> workers;
        for (std::size_t w = 0; w < jobs; ++w)
            workers.emplace_back([&, w] {
                try {
                    for (std::size_t i = w; i < queries.size(); i += jobs) rankings[i] = rank(queries[i]);
                } catch (...) {
                    errors[w] = std::current_exception();
                }
            });
        for (auto& t : workers) t.join();
        for (auto& e : errors)
            if (e) std::rethrow_exception(e);
    }
    auto sid = [](model::SentenceRef r) { return std::to_string(r.doc) + ":" + std::to_string(r.sentence); };
    std::vector<eval::QueryResult> results;
    std::map<std::string, eval::GoldSets> gold;
    for (std::size_t i = 0; i < queries.size(); ++i) {
        const auto& q = queries[i];
        eval::QueryResult r{q.id, {}, {}};
        for (const auto& d : rankings[i].docs) r.docs.push_back(std::to_string(d.doc));
        for (const auto& s : rankings[i].sentences) r.snippets.push_back(sid(s.ref));
        results.push_back(std::move(r));
        auto& g = gold[q.id];
        for (auto d : q.gold_docs) g.docs.insert(std::to_string(d));
        for (auto s : q.gold_snippets) g.snippets.insert(sid(s));
    }
    return eval::evaluate(results, gold, options);
}

double dev_metric(const model::Model& m, std::span<const model::PreparedQuery> dev, const text::TermTable& table,
                  const model::RankLimits& limits, eval::ApDenominator ap, std::size_t jobs) {
    eval::EvalOptions opts;
    opts.cutoff = std::max(limits.docs, limits.sentences);
    opts.ap = ap;
    std::function<model::Ranking(const model::PreparedQuery&)> rank;
    switch (m.config().kind) {
    case model::ModelKind::doc_pdrmm:
        opts.cutoff = limits.docs;
        rank = [&](const model::PreparedQuery& q) {
            return model::rank_from_scores(q, model::score_docs(m, q, table), limits);
        };
        return evaluate_prepared(dev, rank, opts, jobs).docs.map;
    case model::ModelKind::sent_pdrmm:
        opts.cutoff = limits.sentences;
        rank = [&](const model::PreparedQuery& q) { return model::rank_sentence_pdrmm(m, q, table, limits); };
        return evaluate_prepared(dev, rank, opts, jobs).snippets.map;
    case model::ModelKind::joint:
        opts.cutoff = limits.sentences;
        rank = [&](const model::PreparedQuery& q) { return model::rank_joint(m, q, table, limits); };
        return evaluate_prepared(dev, rank, opts, jobs).snippets.map;
    }
    return 0.0;
}

namespace {

std::vector<ad::Array> snapshot(const ad::ParameterSet& params) {
    std::vector<ad::Array> out;
    for (const auto& p : params) out.push_back(p->value);
    return out;
}

void restore(ad::ParameterSet& params, const std::vector<ad::Array>& values) {
    for (std::size_t i = 0; i < values.size(); ++i) params[i].value = values[i];
}

} // namespace

TrainResult train(const TrainConfig& config, std::span<const model::PreparedQuery> train_queries,
                  std::span<const model::PreparedQuery> dev_queries, const text::TermTable& table,
                  std::ostream* log) {
    config.validate();
    if (dev_queries.empty()) throw ArgumentError("training needs a non-empty dev set");
    model::Model m(config.model, splitmix64(config.seed ^ 0x6d6f64656cULL));
    ad::Adam adam(m.params(), {config.learning_rate});
    Rng order_rng(splitmix64(config.seed ^ 0x6f72646572ULL));

    TrainResult result{model::Model(config.model, 0), {}, {}};
    result.meta.seed = config.seed;
    result.meta.dev_metric_name = dev_metric_name(config.model.kind);
    double best = -1.0;
    std::vector<ad::Array> best_values;
    std::size_t since_best = 0;

    for (std::size_t epoch = 1; epoch <= config.max_epochs; ++epoch) {
        auto triples = make_triples(train_queries, epoch_seed(config.seed, epoch));
        if (triples.empty()) throw ArgumentError("no training triples: no query has both a gold and a non-gold candidate");
        order_rng.shuffle(triples);

        if (epoch == 1 && config.model.kind != model::ModelKind::doc_pdrmm && !m.norm().fitted()) {
            std::vector<model::SentenceExtra> samples;
            for (const auto& t : triples)
                for (std::size_t c : {t.positive, t.negative})
                    for (const auto& s : train_queries[t.query].candidates[c].sentences) samples.push_back(s.extra);
            m.norm().fit(samples);
        }

        double loss_total = 0.0;
        const std::size_t batches = (triples.size() + config.batch_size - 1) / config.batch_size;
        for (std::size_t b = 0; b < batches; ++b) {
            const std::size_t begin = b * config.batch_size;
            const std::size_t end = std::min(triples.size(), begin + config.batch_size);
            ad::Graph g;
            std::map<std::size_t, model::Pdrmm::Query> encoded;

            std::vector<ad::Var> losses;
            for (std::size_t i = begin; i < end; ++i) {
                const auto& t = triples[i];
                const auto& q = train_queries[t.query];
                auto it = encoded.find(t.query);
                if (it == encoded.end()) it = encoded.emplace(t.query, m.scorer().encode_query(g, q.query)).first;
                losses.push_back(m.triple_loss(g, it->second, q.candidates[t.positive], q.candidates[t.negative], table));
            }
            ad::Var total = losses[0];
            for (std::size_t i = 1; i < losses.size(); ++i) total = ad::add(total, losses[i]);
            const double batch_sum = total.item();
            if (!std::isfinite(batch_sum))
                throw NumericError("non-finite loss in epoch " + std::to_string(epoch) + ", batch " +
                                   std::to_string(b + 1) + " of " + std::to_string(batches));
            loss_total += batch_sum;
            g.backward(ad::scale(total, 1.0 / static_cast<double>(losses.size())));
            ad::clip_global_norm(m.params(), config.clip_norm);
            adam.step(m.params());
            // Keep the weights at checkpoint precision so the saved model is the evaluated one.
            round_to_float32(m.params());
        }

        EpochRecord rec;
        rec.epoch = epoch;
        rec.triples = triples.size();
        rec.train_loss = loss_total / static_cast<double>(triples.size());
        rec.dev_metric = dev_metric(m, dev_queries, table, config.limits, config.ap, config.jobs);
        rec.improved = rec.dev_metric > best;
        if (rec.improved) {
            best = rec.dev_metric;
            best_values = snapshot(m.params());
            result.meta.epoch = epoch;
            result.meta.dev_metric = best;
            since_best = 0;
        } else {
            ++since_best;
        }
        result.history.push_back(rec);
        if (log) {
            *log << nlohmann::json{{"epoch", rec.epoch},
                                   {"triples", rec.triples},
                                   {"train_loss", rec.train_loss},
                                   {result.meta.dev_metric_name, rec.dev_metric},
                                   {"improved", rec.improved},
                                   {"best_epoch", result.meta.epoch},
                                   {"seed", config.seed}}
                        .dump()
                 << '\n';
            log->flush();
        }
        if (since_best >= config.patience) break;
    }

    restore(m.params(), best_values);
    result.model = std::move(m);
    return result;
}

} // namespace jrank::train
