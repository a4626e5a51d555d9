#include "jrank/train/checkpoint.hpp"

#include "jrank/rng.hpp"

#include <json.hpp>

#include <cstdio>
#include <cstring>
#include <fstream>
#include <iterator>
#include <sstream>

namespace jrank::train {

using nlohmann::json;

namespace {

constexpr const char* kMagic = "JRANK-CHECKPOINT";

json config_json(const model::ModelConfig& c) {
    return {{"kind", model::to_string(c.kind)},
            {"dimension", c.pdrmm.dimension},
            {"top_k", c.pdrmm.top_k},
            {"row_hidden", c.pdrmm.row_hidden},
            {"importance_hidden", c.pdrmm.importance_hidden},
            {"final_hidden", c.pdrmm.final_hidden},
            {"sentence_extra", c.switches.sentence_extra},
            {"doc_extra", c.switches.doc_extra},
            {"margin", c.margin},
            {"lambda_snip", c.lambda_snip}};
}

model::ModelConfig config_from(const json& j) {
    model::ModelConfig c;
    c.kind = model::parse_model_kind(j.at("kind").get<std::string>());
    c.pdrmm.dimension = j.at("dimension").get<std::size_t>();
    c.pdrmm.top_k = j.at("top_k").get<std::size_t>();
    c.pdrmm.row_hidden = j.at("row_hidden").get<std::size_t>();
    c.pdrmm.importance_hidden = j.at("importance_hidden").get<std::size_t>();
    c.pdrmm.final_hidden = j.at("final_hidden").get<std::size_t>();
    c.switches.sentence_extra = j.at("sentence_extra").get<bool>();
    c.switches.doc_extra = j.at("doc_extra").get<bool>();
    c.margin = j.at("margin").get<double>();
    c.lambda_snip = j.at("lambda_snip").get<double>();
    return c;
}

std::string hex64(std::uint64_t v) {
    char buf[17];
    std::snprintf(buf, sizeof buf, "%016llx", static_cast<unsigned long long>(v));
    return buf;
}

} // namespace

void round_to_float32(ad::ParameterSet& params) {
    for (auto& p : params)
        for (std::size_t i = 0; i < p->value.size(); ++i) p->value[i] = static_cast<float>(p->value[i]);
}

void save_checkpoint(const std::string& path, const model::Model& m, const CheckpointMeta& meta) {
    std::string payload;
    json params = json::array();
    for (const auto& p : m.params()) {
        params.push_back({{"name", p->name},
                          {"shape", {p->value.rows(), p->value.cols()}},
                          {"offset", payload.size()}});
        for (std::size_t i = 0; i < p->value.size(); ++i) {
            const float f = static_cast<float>(p->value[i]);
            char b[4];
            std::memcpy(b, &f, 4);
            payload.append(b, 4);
        }
    }
    json header = {{"format_version", kCheckpointVersion},
                   {"config", config_json(m.config())},
                   {"norm", {{"mean", m.norm().mean}, {"stddev", m.norm().stddev}}},
                   {"meta",
                    {{"seed", meta.seed},
                     {"epoch", meta.epoch},
                     {"dev_metric", meta.dev_metric},
                     {"dev_metric_name", meta.dev_metric_name}}},
                   {"parameters", params},
                   {"payload_bytes", payload.size()},
                   {"checksum", hex64(fnv1a64(payload))}};
    const std::string h = header.dump(1);
    std::ofstream out(path, std::ios::binary | std::ios::trunc);
    if (!out) throw IoError("cannot write " + path);
    out << kMagic << '\n' << h.size() << '\n' << h << payload;
    if (!out) throw IoError("write failed: " + path);
}

LoadedCheckpoint load_checkpoint(const std::string& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw IoError("cannot open " + path);
    const std::string bytes((std::istreambuf_iterator<char>(in)), std::istreambuf_iterator<char>());

    const auto nl1 = bytes.find('\n');
    if (nl1 == std::string::npos || bytes.compare(0, nl1, kMagic) != 0)
        throw CheckpointError(path, 1, "not a checkpoint file");
    const auto nl2 = bytes.find('\n', nl1 + 1);
    if (nl2 == std::string::npos) throw CheckpointTruncatedError(path, 2, "missing header length");
    std::size_t header_len = 0;
    try {
        header_len = std::stoull(bytes.substr(nl1 + 1, nl2 - nl1 - 1));
    } catch (const std::exception&) {
        throw CheckpointError(path, 2, "bad header length");
    }
    const std::size_t header_at = nl2 + 1;
    if (bytes.size() < header_at + header_len) throw CheckpointTruncatedError(path, 0, "truncated header");
    json header;
    try {
        header = json::parse(bytes.substr(header_at, header_len));
    } catch (const json::exception& e) {
        throw CheckpointError(path, 0, std::string("bad header: ") + e.what());
    }

    try {
        const int version = header.at("format_version").get<int>();
        if (version != kCheckpointVersion)
            throw CheckpointVersionError(path, 0, "format version " + std::to_string(version) + ", this build reads " +
                                                      std::to_string(kCheckpointVersion));
        const std::size_t payload_bytes = header.at("payload_bytes").get<std::size_t>();
        const std::size_t payload_at = header_at + header_len;
        if (bytes.size() - payload_at < payload_bytes)
            throw CheckpointTruncatedError(path, 0, "payload holds " + std::to_string(bytes.size() - payload_at) +
                                                        " of " + std::to_string(payload_bytes) + " bytes");
        if (bytes.size() - payload_at > payload_bytes) throw CheckpointError(path, 0, "trailing bytes after payload");
        const std::string_view payload(bytes.data() + payload_at, payload_bytes);
        if (hex64(fnv1a64(payload)) != header.at("checksum").get<std::string>())
            throw CheckpointChecksumError(path, 0, "payload checksum mismatch");

        auto params = std::make_unique<ad::ParameterSet>();
        for (const auto& p : header.at("parameters")) {
            const auto shape = p.at("shape").get<std::vector<std::size_t>>();
            if (shape.size() != 2 || shape[0] == 0 || shape[1] == 0)
                throw ShapeError("checkpoint parameter " + p.at("name").get<std::string>() + " has a bad shape");
            const std::size_t offset = p.at("offset").get<std::size_t>();
            const std::size_t count = shape[0] * shape[1];
            if (offset + 4 * count > payload_bytes)
                throw CheckpointTruncatedError(path, 0, "parameter " + p.at("name").get<std::string>() +
                                                            " lies outside the payload");
            ad::Array a(shape[0], shape[1]);
            for (std::size_t i = 0; i < count; ++i) {
                float f;
                std::memcpy(&f, payload.data() + offset + 4 * i, 4);
                a[i] = f;
            }
            params->add(p.at("name").get<std::string>(), std::move(a));
        }
        model::FeatureNorm norm;
        norm.mean = header.at("norm").at("mean").get<std::vector<double>>();
        norm.stddev = header.at("norm").at("stddev").get<std::vector<double>>();
        if (norm.mean.size() != norm.stddev.size() ||
            (!norm.mean.empty() && norm.mean.size() != model::kSentenceExtraCount))
            throw ShapeError("checkpoint normalization statistics have the wrong length");
        CheckpointMeta meta;
        const auto& mj = header.at("meta");
        meta.seed = mj.at("seed").get<std::uint64_t>();
        meta.epoch = mj.at("epoch").get<std::size_t>();
        meta.dev_metric = mj.at("dev_metric").get<double>();
        meta.dev_metric_name = mj.at("dev_metric_name").get<std::string>();
        return {model::Model(config_from(header.at("config")), std::move(params), std::move(norm)), meta};
    } catch (const json::exception& e) {
        throw CheckpointError(path, 0, std::string("bad header: ") + e.what());
    }
}

} // namespace jrank::train
