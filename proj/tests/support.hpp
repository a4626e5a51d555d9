#pragma once

#include "jrank/app/workspace.hpp"
#include "jrank/data/ingest.hpp"
#include "jrank/data/synthetic.hpp"

#include <filesystem>
#include <fstream>
#include <memory>
#include <string>
#include <unistd.h>

namespace jrank::testing {

// Scratch directory removed on destruction.
class TempDir {
public:
    explicit TempDir(const std::string& tag = "t") {
        static int counter = 0;
        path_ = std::filesystem::temp_directory_path() /
                ("jrank-" + tag + "-" + std::to_string(::getpid()) + "-" + std::to_string(counter++));
        std::filesystem::remove_all(path_);
        std::filesystem::create_directories(path_);
    }
    ~TempDir() {
        std::error_code ec;
        std::filesystem::remove_all(path_, ec);
    }
    TempDir(const TempDir&) = delete;
    TempDir& operator=(const TempDir&) = delete;

    std::string file(const std::string& name) const { return (path_ / name).string(); }
    const std::filesystem::path& path() const { return path_; }

private:
    std::filesystem::path path_;
};

inline void write_text(const std::string& path, const std::string& content) {
    std::ofstream out(path, std::ios::binary | std::ios::trunc);
    out << content;
}

inline std::string read_bytes(const std::string& path) {
    std::ifstream in(path, std::ios::binary);
    return {std::istreambuf_iterator<char>(in), std::istreambuf_iterator<char>()};
}

// A small generated collection on disk, loaded as a workspace.
struct SmallCollection {
    TempDir dir{"synth"};
    data::SyntheticDataset dataset;
    std::unique_ptr<app::Workspace> ws;

    explicit SmallCollection(data::SyntheticOptions o = defaults()) {
        dataset = data::generate_synthetic(o);
        data::write_synthetic(dir.path().string(), dataset);
        app::WorkspaceOptions wo;
        wo.corpus = dir.file("corpus.jsonl");
        wo.questions = dir.file("questions.jsonl");
        wo.embeddings = dir.file("embeddings.txt");
        ws = app::Workspace::load(wo);
    }

    static data::SyntheticOptions defaults() {
        data::SyntheticOptions o;
        o.n_docs = 160;
        o.n_train = 24;
        o.n_dev = 8;
        o.n_test = 8;
        o.vocab_size = 400;
        o.dimension = 8;
        o.seed = 5;
        return o;
    }
};

} // namespace jrank::testing
