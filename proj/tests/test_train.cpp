#include "jrank/error.hpp"
#include "jrank/train/checkpoint.hpp"
#include "jrank/train/trainer.hpp"
#include "jrank/train/triples.hpp"

#include "support.hpp"

#include <doctest.h>

#include <algorithm>
#include <cmath>
#include <cstring>
#include <limits>
#include <map>
#include <sstream>

using namespace jrank;
using namespace jrank::train;

namespace {

struct Prepared {
    testing::SmallCollection sc;
    std::vector<model::PreparedQuery> train, dev;

    Prepared() {
        const auto ctx = sc.ws->context();
        const auto tq = sc.ws->questions(sc.dataset.split.train);
        const auto dq = sc.ws->questions(sc.dataset.split.dev);
        train = model::prepare_queries(std::span<const data::Question>(tq), ctx, 3);
        dev = model::prepare_queries(std::span<const data::Question>(dq), ctx, 3);
    }
};

TrainConfig quick(model::ModelKind kind) {
    TrainConfig c;
    c.model.kind = kind;
    c.model.pdrmm.dimension = 8;
    c.model.pdrmm.top_k = 3;
    c.max_epochs = 2;
    c.batch_size = 8;
    c.seed = 17;
    return c;
}

bool same_bits(const ad::ParameterSet& a, const ad::ParameterSet& b) {
    if (a.size() != b.size()) return false;
    for (std::size_t i = 0; i < a.size(); ++i) {
        if (a[i].name != b[i].name || a[i].value.rows() != b[i].value.rows() || a[i].value.cols() != b[i].value.cols())
            return false;
        for (std::size_t j = 0; j < a[i].value.size(); ++j)
        {
            const double x = a[i].value[j], y = b[i].value[j];
            if (std::memcmp(&x, &y, sizeof(double)) != 0) return false;
        }
    }
    return true;
}

} // namespace

TEST_CASE("triples pair each gold candidate with a non-gold one of the same query") {
    Prepared p;
    const auto t = make_triples(p.train, 4);
    std::size_t expected = 0;
    for (const auto& q : p.train) {
        std::size_t gold = 0, other = 0;
        for (const auto& c : q.candidates) ++(c.gold ? gold : other);
        if (other) expected += gold;
    }
    CHECK(t.size() == expected);
    CHECK(!t.empty());
    for (const auto& x : t) {
        CHECK(p.train[x.query].candidates[x.positive].gold);
        CHECK_FALSE(p.train[x.query].candidates[x.negative].gold);
    }
    CHECK(make_triples(p.train, 4) == t);
    CHECK_FALSE(make_triples(p.train, 5) == t);
    CHECK(epoch_seed(1, 1) != epoch_seed(1, 2));
    CHECK(epoch_seed(1, 1) == epoch_seed(1, 1));
}

TEST_CASE("negatives are drawn uniformly from the non-gold candidates") {
    Prepared p;
    // Pick one query and count its negatives over many seeds.
    const auto& q = p.train[0];
    std::map<std::size_t, std::size_t> counts;
    std::size_t others = 0, draws = 0;
    for (const auto& c : q.candidates) others += !c.gold;
    REQUIRE(others > 1);
    for (std::uint64_t s = 0; s < 4000; ++s)
        for (const auto& t : make_triples(std::span(p.train.data(), 1), s)) {
            ++counts[t.negative];
            ++draws;
        }
    CHECK(counts.size() == others);
    // Chi-square with others-1 degrees of freedom, well inside its upper tail.
    const double e = static_cast<double>(draws) / static_cast<double>(others);
    double chi2 = 0.0;
    for (const auto& [_, n] : counts) chi2 += (n - e) * (n - e) / e;
    CHECK(chi2 < 3.0 * static_cast<double>(others) + 30.0);
}

TEST_CASE("training config validation") {
    auto c = quick(model::ModelKind::joint);
    c.learning_rate = 0.0;
    CHECK_THROWS_AS(c.validate(), ArgumentError);
    c = quick(model::ModelKind::joint);
    c.batch_size = 0;
    CHECK_THROWS_AS(c.validate(), ArgumentError);
    c = quick(model::ModelKind::joint);
    c.model.margin = -1.0;
    CHECK_THROWS_AS(c.validate(), ArgumentError);
    CHECK(dev_metric_name(model::ModelKind::doc_pdrmm) != dev_metric_name(model::ModelKind::joint));
}

TEST_CASE("patience zero stops after one epoch") {
    Prepared p;
    auto c = quick(model::ModelKind::doc_pdrmm);
    c.patience = 0;
    c.max_epochs = 10;
    const auto r = train::train(c, p.train, p.dev, p.sc.ws->table);
    CHECK(r.history.size() == 1);
    CHECK(r.meta.epoch == 1);
}

TEST_CASE("training is deterministic and logs every epoch") {
    Prepared p;
    for (auto kind : {model::ModelKind::joint, model::ModelKind::sent_pdrmm, model::ModelKind::doc_pdrmm}) {
        std::ostringstream log_a, log_b;
        const auto a = train::train(quick(kind), p.train, p.dev, p.sc.ws->table, &log_a);
        const auto b = train::train(quick(kind), p.train, p.dev, p.sc.ws->table, &log_b);
        CHECK(same_bits(a.model.params(), b.model.params()));
        CHECK(log_a.str() == log_b.str());
        CHECK(a.meta == b.meta);
        CHECK(a.history.size() == 2);
        const auto text = log_a.str();
        CHECK(std::count(text.begin(), text.end(), '\n') == 2);

        // Another seed gives other weights.
        auto other = quick(kind);
        other.seed = 18;
        CHECK_FALSE(same_bits(a.model.params(), train::train(other, p.train, p.dev, p.sc.ws->table).model.params()));
    }
}

TEST_CASE("the best dev epoch is what is returned") {
    Prepared p;
    auto c = quick(model::ModelKind::joint);
    c.max_epochs = 4;
    c.patience = 4;
    const auto r = train::train(c, p.train, p.dev, p.sc.ws->table);
    double best = -1.0;
    std::size_t best_epoch = 0;
    for (const auto& e : r.history)
        if (e.dev_metric > best) {
            best = e.dev_metric;
            best_epoch = e.epoch;
        }
    CHECK(r.meta.epoch == best_epoch);
    CHECK(r.meta.dev_metric == best);
    CHECK(dev_metric(r.model, p.dev, p.sc.ws->table, c.limits, c.ap) == best);
}

TEST_CASE("non-finite values stop training") {
    Prepared p;
    for (auto& q : p.train) q.query.embeddings(0, 0) = std::numeric_limits<double>::quiet_NaN();
    CHECK_THROWS_AS(train::train(quick(model::ModelKind::joint), p.train, p.dev, p.sc.ws->table), NumericError);
}

TEST_CASE("training needs triples and dev queries") {
    Prepared p;
    CHECK_THROWS_AS(train::train(quick(model::ModelKind::joint), p.train, {}, p.sc.ws->table), ArgumentError);
    for (auto& q : p.train)
        for (auto& c : q.candidates) c.gold = false;
    CHECK_THROWS_AS(train::train(quick(model::ModelKind::joint), p.train, p.dev, p.sc.ws->table), ArgumentError);
}

TEST_CASE("checkpoints round-trip bit for bit") {
    testing::TempDir dir;
    model::ModelConfig mc;
    mc.kind = model::ModelKind::joint;
    mc.pdrmm.dimension = 6;
    mc.margin = 0.5;
    model::Model m(mc, 9);
    round_to_float32(m.params());
    std::vector<model::SentenceExtra> samples(4);
    for (std::size_t i = 0; i < 4; ++i) samples[i].fill(static_cast<double>(i) * 0.3);
    m.norm().fit(samples);
    const CheckpointMeta meta{5, 3, 0.75, "snippet_map"};
    save_checkpoint(dir.file("m.ckpt"), m, meta);
    const auto back = load_checkpoint(dir.file("m.ckpt"));
    CHECK(same_bits(m.params(), back.model.params()));
    CHECK(back.meta == meta);
    CHECK(back.model.config().margin == 0.5);
    CHECK(back.model.config().kind == model::ModelKind::joint);
    CHECK(back.model.norm().mean == m.norm().mean);

    // Saving again gives the same bytes.
    save_checkpoint(dir.file("m2.ckpt"), back.model, back.meta);
    CHECK(testing::read_bytes(dir.file("m.ckpt")) == testing::read_bytes(dir.file("m2.ckpt")));

    SUBCASE("unknown version") {
        auto bytes = testing::read_bytes(dir.file("m.ckpt"));
        const auto at = bytes.find("\"format_version\": 1");
        REQUIRE(at != std::string::npos);
        bytes[at + 18] = '7';
        testing::write_text(dir.file("v.ckpt"), bytes);
        CHECK_THROWS_AS(load_checkpoint(dir.file("v.ckpt")), CheckpointVersionError);
    }
    SUBCASE("truncated") {
        const auto bytes = testing::read_bytes(dir.file("m.ckpt"));
        testing::write_text(dir.file("t.ckpt"), bytes.substr(0, bytes.size() - 5));
        CHECK_THROWS_AS(load_checkpoint(dir.file("t.ckpt")), CheckpointTruncatedError);
        testing::write_text(dir.file("t2.ckpt"), bytes.substr(0, 10));
        CHECK_THROWS_AS(load_checkpoint(dir.file("t2.ckpt")), CheckpointError);
    }
    SUBCASE("corrupted payload") {
        auto bytes = testing::read_bytes(dir.file("m.ckpt"));
        bytes[bytes.size() - 3] ^= 0x10;
        testing::write_text(dir.file("c.ckpt"), bytes);
        CHECK_THROWS_AS(load_checkpoint(dir.file("c.ckpt")), CheckpointChecksumError);
    }
    SUBCASE("not a checkpoint") {
        testing::write_text(dir.file("j.ckpt"), "hello\n");
        CHECK_THROWS_AS(load_checkpoint(dir.file("j.ckpt")), CheckpointError);
        CHECK_THROWS_AS(load_checkpoint(dir.file("none.ckpt")), IoError);
    }
}

TEST_CASE("float32 rounding") {
    ad::ParameterSet ps;
    ps.add("w", ad::Array{{0.1, 1.0 / 3.0}});
    round_to_float32(ps);
    CHECK(ps[0].value[0] == static_cast<double>(0.1f));
    CHECK(ps[0].value[1] == static_cast<double>(1.0f / 3.0f));
}
