// jrank: command-line front end for indexing, dataset construction,
// training, ranking, evaluation and significance testing.

#include "jrank/app/workspace.hpp"
#include "jrank/data/nq.hpp"
#include "jrank/data/synthetic.hpp"
#include "jrank/error.hpp"
#include "jrank/eval/significance.hpp"
#include "jrank/train/checkpoint.hpp"

#include <CLI11.hpp>
#include <json.hpp>

#include <cstdio>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <set>

#include <unistd.h>

namespace {

using namespace jrank;
using nlohmann::json;

enum Exit : int {
    kOk = 0,
    kFailure = 1,
    kUsage = 2,
    kMissingFile = 3,
    kModelMismatch = 4,
    kDataError = 5,
};

// Paths accept JRANK_* environment overrides; flags still win.
void add_collection_flags(CLI::App* cmd, app::WorkspaceOptions& o, bool questions = true) {
    cmd->add_option("--corpus", o.corpus, "Corpus JSONL file")->required()->envname("JRANK_CORPUS");
    if (questions)
        cmd->add_option("--questions", o.questions, "Questions JSONL file")->required()->envname("JRANK_QUESTIONS");
    cmd->add_option("--embeddings", o.embeddings, "word2vec text embeddings")->envname("JRANK_EMBEDDINGS");
    cmd->add_option("--stopwords", o.stopwords, "Stopword list (one per line)");
    cmd->add_option("--abbreviations", o.abbreviations, "Abbreviation guard list (one per line)");
    cmd->add_option("--index", o.index, "Saved BM25 index (built from the corpus when absent)")
        ->envname("JRANK_INDEX");
    cmd->add_option("--dim", o.dimension, "Embedding dimension when no embeddings are given")
        ->capture_default_str();
    cmd->add_option("--k1", o.bm25.k1, "BM25 k1")->capture_default_str();
    cmd->add_option("--b", o.bm25.b, "BM25 b")->capture_default_str();
    cmd->add_option("--top-n", o.top_n, "BM25 candidates per query (N)")->capture_default_str();
}

void require_file(const std::string& path, const std::string& what) {
    if (!path.empty() && !std::filesystem::exists(path)) throw IoError(what + " not found: " + path);
}

void check_collection_files(const app::WorkspaceOptions& o) {
    require_file(o.corpus, "corpus");
    require_file(o.questions, "questions");
    require_file(o.embeddings, "embeddings");
    require_file(o.stopwords, "stopword list");
    require_file(o.abbreviations, "abbreviation list");
    require_file(o.index, "index");
}

// Empty questions file for commands that only need the corpus.
struct ScratchQuestions {
    std::string path;
    ScratchQuestions() {
        path = (std::filesystem::temp_directory_path() / ("jrank-empty-" + std::to_string(::getpid()) + ".jsonl")).string();
        std::ofstream(path).flush();
    }
    ~ScratchQuestions() {
        std::error_code ec;
        std::filesystem::remove(path, ec);
    }
};

void print_json(const json& j) { std::cout << j.dump() << '\n'; }

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"Joint document and snippet ranking"};
    app.require_subcommand(1);
    app.set_config("--config", "", "TOML/INI file with flag defaults");
    std::size_t jobs = 1;
    app.add_option("--jobs", jobs, "Worker threads for ranking and evaluation")->capture_default_str();

    // index
    app::WorkspaceOptions index_ws;
    std::string index_out;
    auto* index_cmd = app.add_subcommand("index", "Build and save the BM25 index of a corpus");
    add_collection_flags(index_cmd, index_ws, false);
    index_cmd->add_option("--out", index_out, "Index file to write")->required();

    // convert-nq
    std::string nq_paragraphs, nq_annotations, nq_out;
    data::NqOptions nq_opts;
    auto* nq_cmd = app.add_subcommand("convert-nq", "Convert pre-extracted Natural Questions paragraphs");
    nq_cmd->add_option("--paragraphs", nq_paragraphs, "Paragraph JSONL file")->required();
    nq_cmd->add_option("--annotations", nq_annotations, "Annotation JSONL file")->required();
    nq_cmd->add_option("--out-dir", nq_out, "Directory for corpus.jsonl and questions.jsonl")->required();
    nq_cmd->add_option("--top-n", nq_opts.top_n, "Keep questions with a gold paragraph in the top N")
        ->capture_default_str();
    nq_cmd->add_option("--k1", nq_opts.bm25.k1, "BM25 k1")->capture_default_str();
    nq_cmd->add_option("--b", nq_opts.bm25.b, "BM25 b")->capture_default_str();

    // gen-synth
    data::SyntheticOptions syn;
    std::string syn_out;
    auto* syn_cmd = app.add_subcommand("gen-synth", "Generate a synthetic dataset");
    syn_cmd->add_option("--out-dir", syn_out, "Output directory")->required();
    syn_cmd->add_option("--docs", syn.n_docs, "Documents")->capture_default_str();
    syn_cmd->add_option("--train", syn.n_train, "Training questions")->capture_default_str();
    syn_cmd->add_option("--dev", syn.n_dev, "Dev questions")->capture_default_str();
    syn_cmd->add_option("--test", syn.n_test, "Test questions")->capture_default_str();
    syn_cmd->add_option("--vocab", syn.vocab_size, "Content vocabulary size")->capture_default_str();
    syn_cmd->add_option("--dim", syn.dimension, "Embedding dimension")->capture_default_str();
    syn_cmd->add_option("--signal", syn.signal, "Probability a planted term is verbatim")->capture_default_str();
    syn_cmd->add_option("--seed", syn.seed, "Seed")->capture_default_str();

    // train
    app::WorkspaceOptions train_ws;
    train::TrainConfig tc;
    std::string train_split, train_out, train_log, train_kind = "joint", train_ap = "classic";
    bool no_sentence_extra = false, no_doc_extra = false;
    auto* train_cmd = app.add_subcommand("train", "Train doc-pdrmm, sent-pdrmm or joint");
    add_collection_flags(train_cmd, train_ws);
    train_cmd->add_option("--split", train_split, "Split file with train and dev ids")->required()
        ->envname("JRANK_SPLIT");
    train_cmd->add_option("--model", train_kind, "doc-pdrmm | sent-pdrmm | joint")->capture_default_str();
    train_cmd->add_option("--out", train_out, "Checkpoint to write")->required();
    train_cmd->add_option("--log", train_log, "JSONL training log (default stderr)");
    train_cmd->add_option("--nd", tc.limits.docs, "Documents returned per query (N_d)")->capture_default_str();
    train_cmd->add_option("--ns", tc.limits.sentences, "Snippets returned per query (N_s)")->capture_default_str();
    train_cmd->add_option("--k", tc.model.pdrmm.top_k, "k of mean-of-top-k pooling")->capture_default_str();
    train_cmd->add_option("--row-hidden", tc.model.pdrmm.row_hidden)->capture_default_str();
    train_cmd->add_option("--importance-hidden", tc.model.pdrmm.importance_hidden)->capture_default_str();
    train_cmd->add_option("--final-hidden", tc.model.pdrmm.final_hidden)->capture_default_str();
    train_cmd->add_option("--margin", tc.model.margin, "Hinge margin")->capture_default_str();
    train_cmd->add_option("--lambda-snip", tc.model.lambda_snip, "Sentence loss weight (joint)")
        ->capture_default_str();
    train_cmd->add_option("--batch-size", tc.batch_size)->capture_default_str();
    train_cmd->add_option("--lr", tc.learning_rate, "Adam learning rate")->capture_default_str();
    train_cmd->add_option("--patience", tc.patience, "Epochs without dev improvement before stopping")
        ->capture_default_str();
    train_cmd->add_option("--max-epochs", tc.max_epochs)->capture_default_str();
    train_cmd->add_option("--clip-norm", tc.clip_norm)->capture_default_str();
    train_cmd->add_option("--seed", tc.seed)->capture_default_str();
    train_cmd->add_flag("--no-sentence-extra", no_sentence_extra, "Drop the 10 sentence features");
    train_cmd->add_flag("--no-doc-extra", no_doc_extra, "Drop the 4 document features");
    train_cmd->add_option("--ap-denominator", train_ap, "classic | min-r-cutoff")->capture_default_str();

    // rank
    app::WorkspaceOptions rank_ws;
    model::RankLimits rank_limits;
    std::string rank_system, rank_split, rank_subset = "test", rank_ckpt, rank_doc_ckpt, rank_sent_ckpt;
    std::string rank_out_docs, rank_out_snippets, rank_tag;
    auto* rank_cmd = app.add_subcommand("rank", "Write document and snippet run files");
    add_collection_flags(rank_cmd, rank_ws);
    rank_cmd->add_option("--model", rank_system, "bm25-bm25 | pdrmm-pipe | jpdrmm | sentence-pdrmm")->required();
    rank_cmd->add_option("--checkpoint", rank_ckpt, "Joint checkpoint (jpdrmm) or sentence checkpoint")
        ->envname("JRANK_CHECKPOINT");
    rank_cmd->add_option("--doc-checkpoint", rank_doc_ckpt, "doc-pdrmm checkpoint (pdrmm-pipe)");
    rank_cmd->add_option("--sentence-checkpoint", rank_sent_ckpt, "sent-pdrmm checkpoint");
    rank_cmd->add_option("--split", rank_split, "Split file; ranks one subset")->envname("JRANK_SPLIT");
    rank_cmd->add_option("--subset", rank_subset, "train | dev | test")->capture_default_str();
    rank_cmd->add_option("--nd", rank_limits.docs, "N_d")->capture_default_str();
    rank_cmd->add_option("--ns", rank_limits.sentences, "N_s")->capture_default_str();
    rank_cmd->add_option("--out-docs", rank_out_docs, "Document run file")->required();
    rank_cmd->add_option("--out-snippets", rank_out_snippets, "Snippet run file")->required();
    rank_cmd->add_option("--tag", rank_tag, "Run tag (default: the model name)");

    // evaluate
    app::WorkspaceOptions eval_ws;
    std::string eval_docs, eval_snippets, eval_out, eval_ap = "classic";
    eval::EvalOptions eval_opts;
    auto* eval_cmd = app.add_subcommand("evaluate", "Score run files against gold labels");
    eval_cmd->add_option("--corpus", eval_ws.corpus, "Corpus JSONL file")->required()->envname("JRANK_CORPUS");
    eval_cmd->add_option("--questions", eval_ws.questions, "Questions JSONL file")->required()
        ->envname("JRANK_QUESTIONS");
    eval_cmd->add_option("--abbreviations", eval_ws.abbreviations, "Abbreviation guard list");
    eval_cmd->add_option("--docs", eval_docs, "Document run file")->required();
    eval_cmd->add_option("--snippets", eval_snippets, "Snippet run file")->required();
    eval_cmd->add_option("--cutoff", eval_opts.cutoff, "AP cutoff")->capture_default_str();
    eval_cmd->add_option("--ap-denominator", eval_ap, "classic | min-r-cutoff")->capture_default_str();
    eval_cmd->add_option("--out", eval_out, "Report file (default stdout)");

    // significance
    app::WorkspaceOptions sig_ws;
    std::string sig_a_docs, sig_a_snip, sig_b_docs, sig_b_snip, sig_level = "snippets", sig_metric = "ap",
                                                                sig_ap = "classic";
    std::size_t sig_iterations = 10000, sig_cutoff = 10;
    std::uint64_t sig_seed = 0;
    auto* sig_cmd = app.add_subcommand("significance", "One-sided approximate randomization test of run A over B");
    sig_cmd->add_option("--corpus", sig_ws.corpus)->required()->envname("JRANK_CORPUS");
    sig_cmd->add_option("--questions", sig_ws.questions)->required()->envname("JRANK_QUESTIONS");
    sig_cmd->add_option("--abbreviations", sig_ws.abbreviations);
    sig_cmd->add_option("--a-docs", sig_a_docs)->required();
    sig_cmd->add_option("--a-snippets", sig_a_snip)->required();
    sig_cmd->add_option("--b-docs", sig_b_docs)->required();
    sig_cmd->add_option("--b-snippets", sig_b_snip)->required();
    sig_cmd->add_option("--level", sig_level, "docs | snippets")->capture_default_str();
    sig_cmd->add_option("--metric", sig_metric, "ap | rr")->capture_default_str();
    sig_cmd->add_option("--cutoff", sig_cutoff)->capture_default_str();
    sig_cmd->add_option("--ap-denominator", sig_ap)->capture_default_str();
    sig_cmd->add_option("--iterations", sig_iterations)->capture_default_str();
    sig_cmd->add_option("--seed", sig_seed)->capture_default_str();

    // params-report
    model::PdrmmConfig pr_cfg;
    bool pr_no_sentence_extra = false, pr_no_doc_extra = false;
    auto* pr_cmd = app.add_subcommand("params-report", "Trainable parameter counts per model");
    pr_cmd->add_option("--dim", pr_cfg.dimension)->capture_default_str();
    pr_cmd->add_option("--k", pr_cfg.top_k)->capture_default_str();
    pr_cmd->add_option("--row-hidden", pr_cfg.row_hidden)->capture_default_str();
    pr_cmd->add_option("--importance-hidden", pr_cfg.importance_hidden)->capture_default_str();
    pr_cmd->add_option("--final-hidden", pr_cfg.final_hidden)->capture_default_str();
    pr_cmd->add_flag("--no-sentence-extra", pr_no_sentence_extra);
    pr_cmd->add_flag("--no-doc-extra", pr_no_doc_extra);

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        const int code = app.exit(e);
        return code == 0 ? kOk : kUsage;
    }

    try {
        if (*index_cmd) {
            check_collection_files(index_ws);
            ScratchQuestions empty;
            index_ws.questions = empty.path;
            index_ws.index.clear();
            const auto ws = app::Workspace::load(index_ws);
            ws->index.save(index_out, ws->table, index_ws.bm25);
            print_json({{"command", "index"},
                        {"documents", ws->index.document_count()},
                        {"terms", ws->index.terms().size()},
                        {"average_length", ws->index.average_length()},
                        {"out", index_out}});
        } else if (*nq_cmd) {
            require_file(nq_paragraphs, "paragraph file");
            require_file(nq_annotations, "annotation file");
            const auto ds = data::convert_nq(data::read_paragraphs(nq_paragraphs), data::read_annotations(nq_annotations),
                                             nq_opts);
            std::filesystem::create_directories(nq_out);
            data::write_corpus((std::filesystem::path(nq_out) / "corpus.jsonl").string(), ds.corpus);
            data::write_questions((std::filesystem::path(nq_out) / "questions.jsonl").string(), ds.questions);
            const auto& s = ds.stats;
            print_json({{"command", "convert-nq"},
                        {"paragraphs", s.paragraphs},
                        {"tables_dropped", s.tables_dropped},
                        {"questions", s.questions},
                        {"dropped_table_answer", s.dropped_table_answer},
                        {"dropped_no_long_answer", s.dropped_no_long_answer},
                        {"dropped_not_retrieved", s.dropped_not_retrieved},
                        {"kept", s.kept},
                        {"top_n", nq_opts.top_n}});
        } else if (*syn_cmd) {
            const auto ds = data::generate_synthetic(syn);
            data::write_synthetic(syn_out, ds);
            print_json({{"command", "gen-synth"},
                        {"documents", ds.corpus.size()},
                        {"questions", ds.questions.size()},
                        {"train", ds.split.train.size()},
                        {"dev", ds.split.dev.size()},
                        {"test", ds.split.test.size()},
                        {"signal", syn.signal},
                        {"seed", syn.seed},
                        {"out_dir", syn_out}});
        } else if (*train_cmd) {
            check_collection_files(train_ws);
            require_file(train_split, "split file");
            tc.model.kind = model::parse_model_kind(train_kind);
            tc.model.switches = {!no_sentence_extra, !no_doc_extra};
            tc.ap = eval::parse_ap_denominator(train_ap);
            tc.jobs = jobs;
            tc.validate();
            const auto ws = app::Workspace::load(train_ws);
            tc.model.pdrmm.dimension = ws->table.dimension();
            const auto split = data::read_split(train_split);
            std::ofstream log_file;
            std::ostream* log = &std::cerr;
            if (!train_log.empty()) {
                log_file.open(train_log, std::ios::binary | std::ios::trunc);
                if (!log_file) throw IoError("cannot write " + train_log);
                log = &log_file;
            }
            const auto result = app::train_model(*ws, split, tc, log);
            train::save_checkpoint(train_out, result.model, result.meta);
            print_json({{"command", "train"},
                        {"model", model::to_string(tc.model.kind)},
                        {"seed", tc.seed},
                        {"epochs", result.history.size()},
                        {"best_epoch", result.meta.epoch},
                        {result.meta.dev_metric_name, result.meta.dev_metric},
                        {"parameters", result.model.parameter_count()},
                        {"out", train_out}});
        } else if (*rank_cmd) {
            check_collection_files(rank_ws);
            require_file(rank_split, "split file");
            const auto system = app::parse_system(rank_system);
            rank_limits.validate();
            std::optional<train::LoadedCheckpoint> main_ck, doc_ck, sent_ck;
            auto load = [](const std::string& path) {
                require_file(path, "checkpoint");
                return train::load_checkpoint(path);
            };
            app::SystemModels models;
            if (system == app::System::jpdrmm && !rank_ckpt.empty()) {
                main_ck.emplace(load(rank_ckpt));
                models.joint = &main_ck->model;
            }
            if (system == app::System::pdrmm_pipe && !rank_doc_ckpt.empty()) {
                doc_ck.emplace(load(rank_doc_ckpt));
                models.doc = &doc_ck->model;
            }
            if (system == app::System::pdrmm_pipe || system == app::System::sentence_pdrmm) {
                const std::string& p = !rank_sent_ckpt.empty() ? rank_sent_ckpt : rank_ckpt;
                if (!p.empty()) {
                    sent_ck.emplace(load(p));
                    models.sentence = &sent_ck->model;
                }
            }
            const auto ws = app::Workspace::load(rank_ws);
            app::check_models(system, models, ws->table);
            std::vector<std::string> ids;
            if (!rank_split.empty()) {
                const auto split = data::read_split(rank_split);
                if (rank_subset == "train") ids = split.train;
                else if (rank_subset == "dev") ids = split.dev;
                else if (rank_subset == "test") ids = split.test;
                else throw ArgumentError("--subset must be train, dev or test");
            }
            const auto questions = ws->questions(ids);
            const auto runs = app::rank_questions(*ws, system, models, questions, rank_limits,
                                                  rank_tag.empty() ? rank_system : rank_tag, jobs);
            eval::write_run(rank_out_docs, runs.docs);
            eval::write_run(rank_out_snippets, runs.snippets);
            json seeds = json::array();
            for (const auto* ck : {&main_ck, &doc_ck, &sent_ck})
                if (*ck) seeds.push_back((*ck)->meta.seed);
            print_json({{"command", "rank"},
                        {"model", rank_system},
                        {"queries", questions.size()},
                        {"seeds", seeds},
                        {"n", rank_ws.top_n},
                        {"nd", rank_limits.docs},
                        {"ns", rank_limits.sentences},
                        {"docs", rank_out_docs},
                        {"snippets", rank_out_snippets}});
        } else if (*eval_cmd) {
            require_file(eval_ws.corpus, "corpus");
            require_file(eval_ws.questions, "questions");
            require_file(eval_docs, "document run");
            require_file(eval_snippets, "snippet run");
            eval_opts.ap = eval::parse_ap_denominator(eval_ap);
            const auto ws = app::Workspace::load(eval_ws);
            const auto report =
                app::evaluate_runs(*ws, {eval::read_run(eval_docs), eval::read_run(eval_snippets)}, eval_opts);
            if (eval_out.empty())
                eval::write_report(std::cout, report);
            else
                eval::write_report(eval_out, report);
            std::fprintf(stderr, "queries %zu  doc MAP %.4f  snippet MAP %.4f  doc MRR %.4f  snippet MRR %.4f\n",
                         report.queries.size(), report.docs.map, report.snippets.map, report.docs.mrr,
                         report.snippets.mrr);
        } else if (*sig_cmd) {
            for (const auto* p : {&sig_ws.corpus, &sig_ws.questions, &sig_a_docs, &sig_a_snip, &sig_b_docs, &sig_b_snip})
                require_file(*p, "input");
            const auto ws = app::Workspace::load(sig_ws);
            eval::EvalOptions o;
            o.cutoff = sig_cutoff;
            o.ap = eval::parse_ap_denominator(sig_ap);
            auto a = eval::group_runs(eval::read_run(sig_a_docs), eval::read_run(sig_a_snip));
            auto b = eval::group_runs(eval::read_run(sig_b_docs), eval::read_run(sig_b_snip));
            // Pair on the union of query ids; a query missing from one run ranks nothing there.
            std::set<std::string> ids;
            for (const auto& r : a) ids.insert(r.query_id);
            for (const auto& r : b) ids.insert(r.query_id);
            auto complete = [&](std::vector<eval::QueryResult>& runs) {
                std::set<std::string> have;
                for (const auto& r : runs) have.insert(r.query_id);
                for (const auto& id : ids)
                    if (!have.count(id)) runs.push_back({id, {}, {}});
            };
            complete(a);
            complete(b);
            const auto gold = ws->gold();
            const auto va = eval::per_query(eval::evaluate(a, gold, o), sig_level, sig_metric);
            const auto vb = eval::per_query(eval::evaluate(b, gold, o), sig_level, sig_metric);
            const auto r = eval::approximate_randomization(va, vb, sig_iterations, sig_seed);
            print_json({{"command", "significance"},
                        {"level", sig_level},
                        {"metric", sig_metric},
                        {"queries", va.size()},
                        {"observed_difference", r.observed},
                        {"p_value", r.p_value},
                        {"iterations", r.iterations},
                        {"seed", sig_seed}});
        } else if (*pr_cmd) {
            const auto r = model::parameter_report(pr_cfg, {!pr_no_sentence_extra, !pr_no_doc_extra});
            print_json({{"command", "params-report"},
                        {"dimension", pr_cfg.dimension},
                        {"doc_pdrmm", r.doc_pdrmm},
                        {"sent_pdrmm", r.sent_pdrmm},
                        {"pdrmm_pipe", r.pipeline},
                        {"jpdrmm", r.joint},
                        {"sentence_pdrmm", r.sentence_ablation},
                        {"bm25_bm25", 0}});
            std::fprintf(stderr, "%-16s %8s\n%-16s %8d\n%-16s %8zu\n%-16s %8zu\n%-16s %8zu\n", "model", "params",
                         "BM25+BM25", 0, "PDRMM-Pipe", r.pipeline, "JPDRMM", r.joint, "Sentence PDRMM",
                         r.sentence_ablation);
        }
    } catch (const IoError& e) {
        std::fprintf(stderr, "error: %s\n", e.what());
        return kMissingFile;
    } catch (const train::CheckpointError& e) {
        std::fprintf(stderr, "error: checkpoint: %s\n", e.what());
        return kModelMismatch;
    } catch (const ShapeError& e) {
        std::fprintf(stderr, "error: model mismatch: %s\n", e.what());
        return kModelMismatch;
    } catch (const FormatError& e) {
        std::fprintf(stderr, "error: %s\n", e.what());
        return kDataError;
    } catch (const DataError& e) {
        std::fprintf(stderr, "error: %s\n", e.what());
        return kDataError;
    } catch (const ArgumentError& e) {
        std::fprintf(stderr, "error: %s\n", e.what());
        return kUsage;
    } catch (const std::exception& e) {
        std::fprintf(stderr, "error: %s\n", e.what());
        return kFailure;
    }
    return kOk;
}
