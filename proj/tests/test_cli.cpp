#include "support.hpp"

#include <doctest.h>

#include <cstdio>
#include <cstdlib>
#include <string>

#include <sys/wait.h>

namespace {

struct Result {
    int code;
    std::string out;
};

Result run(const std::string& args) {
    const std::string cmd = std::string(JRANK_CLI) + " " + args + " 2>/dev/null";
    Result r{-1, {}};
    FILE* p = ::popen(cmd.c_str(), "r");
    REQUIRE(p != nullptr);
    char buf[4096];
    std::size_t n;
    while ((n = std::fread(buf, 1, sizeof buf, p)) > 0) r.out.append(buf, n);
    const int status = ::pclose(p);
    r.code = WIFEXITED(status) ? WEXITSTATUS(status) : -1;
    return r;
}

} // namespace

TEST_CASE("cli exit codes") {
    jrank::testing::TempDir dir{"cli"};
    const auto d = dir.file("syn");
    REQUIRE(run("gen-synth --out-dir " + d + " --docs 60 --train 12 --dev 4 --test 4 --vocab 200").code == 0);
    const std::string coll = " --corpus " + d + "/corpus.jsonl --questions " + d + "/questions.jsonl --embeddings " + d +
                             "/embeddings.txt --top-n 20";

    CHECK(run("").code == 2);
    CHECK(run("rank --model nonsense" + coll + " --out-docs x --out-snippets y").code == 2);
    CHECK(run("index --corpus " + dir.file("absent.jsonl") + " --out " + dir.file("i")).code == 3);

    jrank::testing::write_text(dir.file("bad.jsonl"), "{\"id\": \"d1\", \"body\": \"ok text.\"}\n{not json\n");
    CHECK(run("index --corpus " + dir.file("bad.jsonl") + " --out " + dir.file("i")).code == 5);

    const auto ck = dir.file("doc.ckpt");
    REQUIRE(run("train" + coll + " --split " + d + "/split.json --model doc-pdrmm --max-epochs 1 --out " + ck +
                " --log " + dir.file("log"))
                .code == 0);
    // A document model cannot serve as the joint model.
    CHECK(run("rank --model jpdrmm" + coll + " --checkpoint " + ck + " --out-docs " + dir.file("a") +
              " --out-snippets " + dir.file("b"))
              .code == 4);

    auto bytes = jrank::testing::read_bytes(ck);
    bytes[bytes.size() - 2] ^= 0x01;
    jrank::testing::write_text(dir.file("bad.ckpt"), bytes);
    CHECK(run("rank --model pdrmm-pipe" + coll + " --doc-checkpoint " + dir.file("bad.ckpt") + " --sentence-checkpoint " +
              ck + " --out-docs " + dir.file("a") + " --out-snippets " + dir.file("b"))
              .code == 4);

    const auto ok = run("rank --model bm25-bm25" + coll + " --split " + d + "/split.json --out-docs " + dir.file("a") +
                        " --out-snippets " + dir.file("b"));
    CHECK(ok.code == 0);
    CHECK(!jrank::testing::read_bytes(dir.file("a")).empty());

    const auto pr = run("params-report");
    CHECK(pr.code == 0);
    CHECK(pr.out.find("5979") != std::string::npos);
}
