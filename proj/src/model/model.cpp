#include "jrank/model/model.hpp"

#include "jrank/ad/ops.hpp"
#include "jrank/error.hpp"

namespace jrank::model {

std::string to_string(ModelKind kind) {
    switch (kind) {
    case ModelKind::doc_pdrmm: return "doc-pdrmm";
    case ModelKind::sent_pdrmm: return "sent-pdrmm";
    case ModelKind::joint: return "joint";
    }
    return "?";
}

ModelKind parse_model_kind(const std::string& name) {
    if (name == "doc-pdrmm") return ModelKind::doc_pdrmm;
    if (name == "sent-pdrmm") return ModelKind::sent_pdrmm;
    if (name == "joint" || name == "jpdrmm") return ModelKind::joint;
    throw ArgumentError("unknown model kind '" + name + "' (expected doc-pdrmm, sent-pdrmm or joint)");
}

void ModelConfig::validate() const {
    pdrmm.validate();
    if (!(margin > 0.0)) throw ArgumentError("margin must be positive");
    if (!(lambda_snip > 0.0)) throw ArgumentError("lambda_snip must be positive");
}

std::size_t ModelConfig::extra_features() const {
    if (kind == ModelKind::doc_pdrmm) return switches.doc_extra ? kDocExtraCount : 0;
    return switches.sentence_extra ? kSentenceExtraCount : 0;
}

namespace {

constexpr const char* kScorerPrefix = "pdrmm.";

} // namespace

Model::Model(const ModelConfig& config, std::uint64_t seed)
    : config_(config), params_(std::make_unique<ad::ParameterSet>()) {
    config_.validate();
    Rng rng(seed);
    Pdrmm::declare(*params_, kScorerPrefix, config_.pdrmm, config_.extra_features(), rng);
    if (config_.kind == ModelKind::joint) JointTop::declare(*params_, config_.pdrmm, config_.switches, rng);
    bind();
}

Model::Model(const ModelConfig& config, std::unique_ptr<ad::ParameterSet> params, FeatureNorm norm)
    : config_(config), params_(std::move(params)), norm_(std::move(norm)) {
    config_.validate();
    bind();
    std::size_t expected = 0;
    {
        Model fresh(config_, 0);
        expected = fresh.params().size();
    }
    if (params_->size() != expected)
        throw ShapeError("checkpoint holds " + std::to_string(params_->size()) + " parameters, " +
                         to_string(config_.kind) + " expects " + std::to_string(expected));
}

void Model::bind() {
    scorer_ = Pdrmm(*params_, kScorerPrefix, config_.pdrmm, config_.extra_features());
    if (config_.kind == ModelKind::joint) top_.emplace(*params_, config_.pdrmm, config_.switches);
}

const JointTop& Model::top() const {
    if (!top_) throw ArgumentError("model " + to_string(config_.kind) + " has no joint layers");
    return *top_;
}

ad::Var Model::doc_score(ad::Graph& g, const Pdrmm::Query& q, const CandidateInput& cand,
                         const text::TermTable& table) const {
    if (config_.kind != ModelKind::doc_pdrmm) throw ArgumentError("doc_score needs a doc-pdrmm model");
    ad::Array extra(1, kDocExtraCount);
    for (std::size_t i = 0; i < kDocExtraCount; ++i) extra(0, i) = cand.extra[i];
    return scorer_.score(g, q, cand.text, config_.switches.doc_extra ? extra : ad::Array(1, 0), table);
}

ad::Var Model::sentence_scores(ad::Graph& g, const Pdrmm::Query& q, const CandidateInput& cand,
                               const text::TermTable& table) const {
    if (config_.kind == ModelKind::doc_pdrmm) throw ArgumentError("sentence_scores needs a sentence scorer");
    return model::sentence_scores(g, scorer_, q, cand, norm_, table);
}

JointOutput Model::joint(ad::Graph& g, const Pdrmm::Query& q, const CandidateInput& cand,
                         const text::TermTable& table) const {
    return joint_forward(g, scorer_, top(), q, cand, norm_, table);
}

ad::Var Model::triple_loss(ad::Graph& g, const Pdrmm::Query& q, const CandidateInput& pos,
                           const CandidateInput& neg, const text::TermTable& table) const {
    switch (config_.kind) {
    case ModelKind::doc_pdrmm:
        return pairwise_hinge(doc_score(g, q, pos, table), doc_score(g, q, neg, table), config_.margin);
    case ModelKind::sent_pdrmm:
        return ad::add(ad::bce_with_logits(sentence_scores(g, q, pos, table), sentence_labels(pos)),
                       ad::bce_with_logits(sentence_scores(g, q, neg, table), sentence_labels(neg)));
    case ModelKind::joint:
        return joint_loss(joint(g, q, pos, table), joint(g, q, neg, table), sentence_labels(pos),
                          sentence_labels(neg), config_.margin, config_.lambda_snip);
    }
    throw ArgumentError("unknown model kind");
}

ParameterReport parameter_report(const PdrmmConfig& pdrmm, const FeatureSwitches& switches) {
    auto count = [&](ModelKind kind) {
        ModelConfig c;
        c.kind = kind;
        c.pdrmm = pdrmm;
        c.switches = switches;
        return Model(c, 0).parameter_count();
    };
    ParameterReport r;
    r.doc_pdrmm = count(ModelKind::doc_pdrmm);
    r.sent_pdrmm = count(ModelKind::sent_pdrmm);
    r.pipeline = r.doc_pdrmm + r.sent_pdrmm;
    r.joint = count(ModelKind::joint);
    r.sentence_ablation = r.sent_pdrmm;
    return r;
}

} // namespace jrank::model
