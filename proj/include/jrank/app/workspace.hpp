#pragma once

#include "jrank/data/ingest.hpp"
#include "jrank/eval/runfile.hpp"
#include "jrank/model/rank.hpp"
#include "jrank/train/trainer.hpp"

#include <map>
#include <memory>
#include <optional>
#include <string>
#include <vector>

namespace jrank::app {

struct WorkspaceOptions {
    std::string corpus;
    std::string questions;
    std::string embeddings;    // optional word2vec text file
    std::string stopwords;     // optional word list, default bundled
    std::string abbreviations; // optional word list, default bundled
    std::string index;         // optional saved index; built from the corpus otherwise
    std::size_t dimension = 30; // when no embeddings are given
    std::uint64_t table_seed = 13;
    index::Bm25Params bm25;
    std::size_t top_n = 100;
};

/// A loaded collection: corpus, questions, term table and BM25 index.
/// Immutable after load; address-stable (held by unique_ptr).
struct Workspace {
    WorkspaceOptions options;
    text::WordList stopwords;
    text::WordList abbreviations;
    data::Dataset data;
    text::TermTable table;
    index::InvertedIndex index;

    static std::unique_ptr<Workspace> load(const WorkspaceOptions& options);

    model::RetrievalContext context() const;
    /// Questions listed in `ids` (all questions sorted by id when empty).
    std::vector<data::Question> questions(const std::vector<std::string>& ids = {}) const;
    std::map<std::string, eval::GoldSets> gold() const;
};

/// Term table over the corpus with optional embeddings.
text::TermTable build_table(const data::Corpus& corpus, const std::string& embeddings_path, std::size_t dimension,
                            std::uint64_t seed, const text::WordList& stopwords);

enum class System { bm25_bm25, pdrmm_pipe, jpdrmm, sentence_pdrmm };
std::string to_string(System s);
/// Accepts bm25-bm25, pdrmm-pipe, jpdrmm, sentence-pdrmm.
System parse_system(const std::string& name);

/// Models a system needs: pdrmm-pipe uses `doc` (doc-pdrmm) and `sentence`
/// (sent-pdrmm); jpdrmm uses `joint`; sentence-pdrmm uses `sentence`.
struct SystemModels {
    const model::Model* doc = nullptr;
    const model::Model* sentence = nullptr;
    const model::Model* joint = nullptr;
};

/// Throws ShapeError when a required model is missing or has the wrong kind,
/// or when its embedding dimension differs from the table's.
void check_models(System system, const SystemModels& models, const text::TermTable& table);

struct RunFiles {
    std::vector<eval::RunLine> docs;
    std::vector<eval::RunLine> snippets;
};

/// Ranks `questions` (output ordered by question id regardless of `jobs`).
RunFiles rank_questions(const Workspace& ws, System system, const SystemModels& models,
                        const std::vector<data::Question>& questions, const model::RankLimits& limits,
                        const std::string& tag, std::size_t jobs = 1);

/// Evaluates run files against the workspace's gold sets.
eval::EvalReport evaluate_runs(const Workspace& ws, const RunFiles& runs, const eval::EvalOptions& options);

/// Prepares the train and dev queries of a split and trains one model kind.
train::TrainResult train_model(const Workspace& ws, const data::SplitSpec& split, const train::TrainConfig& config,
                               std::ostream* log = nullptr);

} // namespace jrank::app
