#include "jrank/app/workspace.hpp"

#include "jrank/error.hpp"

#include <algorithm>
#include <thread>
#include <unordered_set>

namespace jrank::app {

text::TermTable build_table(const data::Corpus& corpus, const std::string& embeddings_path, std::size_t dimension,
                            std::uint64_t seed, const text::WordList& stopwords) {
    const auto tokens = corpus.token_lists();
    text::TermTableOptions opts;
    opts.dimension = dimension;
    opts.seed = seed;
    opts.stopwords = &stopwords;
    if (embeddings_path.empty()) return text::TermTable::build(tokens, nullptr, opts);
    std::unordered_set<std::string> vocab;
    for (const auto& doc : tokens) vocab.insert(doc.begin(), doc.end());
    const auto emb = text::load_word2vec_text(embeddings_path, &vocab);
    return text::TermTable::build(tokens, &emb, opts);
}

std::unique_ptr<Workspace> Workspace::load(const WorkspaceOptions& options) {
    options.bm25.validate();
    if (options.top_n == 0) throw ArgumentError("N must be at least 1");
    auto ws = std::make_unique<Workspace>();
    ws->options = options;
    ws->stopwords = options.stopwords.empty() ? text::default_stopwords() : text::load_word_list(options.stopwords);
    ws->abbreviations =
        options.abbreviations.empty() ? text::default_abbreviations() : text::load_word_list(options.abbreviations);
    ws->data = data::ingest(options.corpus, options.questions, ws->abbreviations);
    ws->table = build_table(ws->data.corpus, options.embeddings, options.dimension, options.table_seed, ws->stopwords);
    ws->data.corpus.encode(ws->table);
    data::encode_questions(ws->data.questions, ws->table);
    if (options.index.empty()) {
        ws->index = index::InvertedIndex::build(ws->data.corpus.ids(), ws->data.corpus.term_lists());
    } else {
        ws->index = index::InvertedIndex::load(options.index, ws->table);
        if (ws->index.doc_ids() != ws->data.corpus.ids())
            throw DataError("index " + options.index + " was built from a different corpus");
    }
    return ws;
}

model::RetrievalContext Workspace::context() const {
    return {data.corpus, table, index, options.bm25, options.top_n};
}

std::vector<data::Question> Workspace::questions(const std::vector<std::string>& ids) const {
    if (!ids.empty()) return data::select(data.questions, ids);
    auto all = data.questions;
    std::sort(all.begin(), all.end(), [](const auto& a, const auto& b) { return a.id < b.id; });
    return all;
}

std::map<std::string, eval::GoldSets> Workspace::gold() const {
    std::map<std::string, eval::GoldSets> out;
    for (const auto& q : data.questions) {
        auto& g = out[q.id];
        for (auto d : q.gold_docs) g.docs.insert(data.corpus[d].id);
        for (auto s : q.gold_snippets) g.snippets.insert(eval::snippet_id(data.corpus[s.doc].id, s.sentence));
    }
    return out;
}

std::string to_string(System s) {
    switch (s) {
    case System::bm25_bm25: return "bm25-bm25";
    case System::pdrmm_pipe: return "pdrmm-pipe";
    case System::jpdrmm: return "jpdrmm";
    case System::sentence_pdrmm: return "sentence-pdrmm";
    }
    return "?";
}

System parse_system(const std::string& name) {
    if (name == "bm25-bm25") return System::bm25_bm25;
    if (name == "pdrmm-pipe") return System::pdrmm_pipe;
    if (name == "jpdrmm") return System::jpdrmm;
    if (name == "sentence-pdrmm") return System::sentence_pdrmm;
    throw ArgumentError("unknown model '" + name + "' (expected bm25-bm25, pdrmm-pipe, jpdrmm or sentence-pdrmm)");
}

void check_models(System system, const SystemModels& models, const text::TermTable& table) {
    auto need = [&](const model::Model* m, model::ModelKind kind, const char* role) {
        if (!m) throw ShapeError(to_string(system) + " needs a " + model::to_string(kind) + " checkpoint for " + role);
        if (m->config().kind != kind)
            throw ShapeError(to_string(system) + ": the " + role + " checkpoint holds a " +
                             model::to_string(m->config().kind) + " model, expected " + model::to_string(kind));
        if (m->config().pdrmm.dimension != table.dimension())
            throw ShapeError("checkpoint embedding dimension " + std::to_string(m->config().pdrmm.dimension) +
                             " does not match the term table's " + std::to_string(table.dimension()));
    };
    switch (system) {
    case System::bm25_bm25: break;
    case System::pdrmm_pipe:
        need(models.doc, model::ModelKind::doc_pdrmm, "documents");
        need(models.sentence, model::ModelKind::sent_pdrmm, "sentences");
        break;
    case System::jpdrmm: need(models.joint, model::ModelKind::joint, "joint ranking"); break;
    case System::sentence_pdrmm: need(models.sentence, model::ModelKind::sent_pdrmm, "sentences"); break;
    }
}

namespace {

std::size_t prepare_k(System system, const SystemModels& m) {
    switch (system) {
    case System::pdrmm_pipe:
        if (m.doc->config().pdrmm.top_k != m.sentence->config().pdrmm.top_k)
            throw ShapeError("pdrmm-pipe: document and sentence checkpoints use different k");
        return m.doc->config().pdrmm.top_k;
    case System::jpdrmm: return m.joint->config().pdrmm.top_k;
    case System::sentence_pdrmm: return m.sentence->config().pdrmm.top_k;
    case System::bm25_bm25: break;
    }
    return 1;
}

} // namespace

RunFiles rank_questions(const Workspace& ws, System system, const SystemModels& models,
                        const std::vector<data::Question>& questions, const model::RankLimits& limits,
                        const std::string& tag, std::size_t jobs) {
    limits.validate();
    check_models(system, models, ws.table);
    if (limits.docs > ws.options.top_n) throw ArgumentError("N_d must not exceed N");
    std::vector<std::size_t> order(questions.size());
    for (std::size_t i = 0; i < order.size(); ++i) order[i] = i;
    std::sort(order.begin(), order.end(), [&](auto a, auto b) { return questions[a].id < questions[b].id; });

    const auto ctx = ws.context();
    std::vector<model::Ranking> rankings(questions.size());
    auto rank_one = [&](std::size_t i) {
        const auto& q = questions[i];
        if (system == System::bm25_bm25) {
            rankings[i] = model::rank_bm25(q.terms, ctx, limits);
            return;
        }
        const auto pq = model::prepare_query(q, ctx, prepare_k(system, models));
        switch (system) {
        case System::pdrmm_pipe:
            rankings[i] = model::rank_pipeline(*models.doc, *models.sentence, pq, ws.table, limits);
            break;
        case System::jpdrmm: rankings[i] = model::rank_joint(*models.joint, pq, ws.table, limits); break;
        case System::sentence_pdrmm:
            rankings[i] = model::rank_sentence_pdrmm(*models.sentence, pq, ws.table, limits);
            break;
        case System::bm25_bm25: break;
        }
    };
    jobs = std::clamp<std::size_t>(jobs, 1, std::max<std::size_t>(questions.size(), 1));
    if (jobs == 1) {
        for (std::size_t i = 0; i < questions.size(); ++i) rank_one(i);
    } else {
        std::vector<std::exception_ptr> errors(jobs);
        std::vector<std::thread> workers;
        for (std::size_t w = 0; w < jobs; ++w)
            workers.emplace_back([&, w] {
                try {
                    for (std::size_t i = w; i < questions.size(); i += jobs) rank_one(i);
                } catch (...) {
                    errors[w] = std::current_exception();
                }
            });
        for (auto& t : workers) t.join();
        for (auto& e : errors)
            if (e) std::rethrow_exception(e);
    }

    RunFiles out;
    const auto& corpus = ws.data.corpus;
    for (std::size_t i : order) {
        const auto& r = rankings[i];
        for (std::size_t k = 0; k < r.docs.size(); ++k)
            out.docs.push_back({questions[i].id, k + 1, corpus[r.docs[k].doc].id, r.docs[k].score, tag});
        for (std::size_t k = 0; k < r.sentences.size(); ++k) {
            const auto ref = r.sentences[k].ref;
            out.snippets.push_back(
                {questions[i].id, k + 1, eval::snippet_id(corpus[ref.doc].id, ref.sentence), r.sentences[k].score, tag});
        }
    }
    return out;
}

eval::EvalReport evaluate_runs(const Workspace& ws, const RunFiles& runs, const eval::EvalOptions& options) {
    return eval::evaluate(eval::group_runs(runs.docs, runs.snippets), ws.gold(), options);
}

train::TrainResult train_model(const Workspace& ws, const data::SplitSpec& split, const train::TrainConfig& config,
                               std::ostream* log) {
    split.validate(ws.data.questions);
    auto cfg = config;
    if (cfg.model.pdrmm.dimension != ws.table.dimension())
        throw ShapeError("model dimension " + std::to_string(cfg.model.pdrmm.dimension) +
                         " does not match the term table's " + std::to_string(ws.table.dimension()));
    if (cfg.limits.docs > ws.options.top_n) throw ArgumentError("N_d must not exceed N");
    const auto ctx = ws.context();
    const auto train_q = ws.questions(split.train);
    const auto dev_q = ws.questions(split.dev);
    const auto k = cfg.model.pdrmm.top_k;
    const auto train_p = model::prepare_queries(train_q, ctx, k, cfg.jobs);
    const auto dev_p = model::prepare_queries(dev_q, ctx, k, cfg.jobs);
    return train::train(cfg, train_p, dev_p, ws.table, log);
}

} // namespace jrank::app
