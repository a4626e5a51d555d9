#pragma once

#include "jrank/model/joint.hpp"

#include <memory>
#include <optional>
#include <string>

namespace jrank::model {

enum class ModelKind { doc_pdrmm, sent_pdrmm, joint };

std::string to_string(ModelKind kind);
/// Accepts "doc-pdrmm", "sent-pdrmm", "joint"; throws ArgumentError otherwise.
ModelKind parse_model_kind(const std::string& name);

struct ModelConfig {
    ModelKind kind = ModelKind::joint;
    PdrmmConfig pdrmm;
    FeatureSwitches switches;
    double margin = 1.0;
    double lambda_snip = 1.0;

    void validate() const;
    /// Number of hand-made inputs of the PDRMM instance this model owns.
    std::size_t extra_features() const;
};

/// Parameters plus the wiring of one trainable model kind:
///   doc-pdrmm   one document PDRMM with 4 document extras;
///   sent-pdrmm  one sentence PDRMM with 10 sentence extras;
///   joint       a sentence PDRMM plus the joint top layers.
/// Movable; parameter addresses stay valid across moves.
class Model {
public:
    /// Fresh parameters drawn from `seed`.
    Model(const ModelConfig& config, std::uint64_t seed);
    /// Adopts loaded parameters; throws ShapeError when they do not fit the config.
    Model(const ModelConfig& config, std::unique_ptr<ad::ParameterSet> params, FeatureNorm norm);

    Model(Model&&) noexcept = default;
    Model& operator=(Model&&) noexcept = default;

    const ModelConfig& config() const noexcept { return config_; }
    ad::ParameterSet& params() noexcept { return *params_; }
    const ad::ParameterSet& params() const noexcept { return *params_; }
    std::size_t parameter_count() const noexcept { return params_->scalar_count(); }

    FeatureNorm& norm() noexcept { return norm_; }
    const FeatureNorm& norm() const noexcept { return norm_; }

    const Pdrmm& scorer() const noexcept { return scorer_; }
    /// Only for joint models.
    const JointTop& top() const;

    /// Document score of a doc-pdrmm model, (1 x 1).
    ad::Var doc_score(ad::Graph& g, const Pdrmm::Query& q, const CandidateInput& cand,
                      const text::TermTable& table) const;
    /// Initial sentence scores of a sent-pdrmm or joint model, (k x 1).
    ad::Var sentence_scores(ad::Graph& g, const Pdrmm::Query& q, const CandidateInput& cand,
                            const text::TermTable& table) const;
    JointOutput joint(ad::Graph& g, const Pdrmm::Query& q, const CandidateInput& cand,
                      const text::TermTable& table) const;

    /// Training loss of one triple for this model kind: hinge for doc-pdrmm,
    /// summed sentence cross-entropy for sent-pdrmm, the joint loss for joint.
    ad::Var triple_loss(ad::Graph& g, const Pdrmm::Query& q, const CandidateInput& pos, const CandidateInput& neg,
                        const text::TermTable& table) const;

private:
    void bind();

    ModelConfig config_;
    std::unique_ptr<ad::ParameterSet> params_;
    FeatureNorm norm_;
    Pdrmm scorer_;
    std::optional<JointTop> top_;
};

/// Trainable parameter counts of the ranking systems for a configuration.
struct ParameterReport {
    std::size_t doc_pdrmm = 0;
    std::size_t sent_pdrmm = 0;
    std::size_t pipeline = 0; // doc + sentence instances
    std::size_t joint = 0;
    std::size_t sentence_ablation = 0; // the sentence instance alone
};
ParameterReport parameter_report(const PdrmmConfig& pdrmm, const FeatureSwitches& switches = {});

} // namespace jrank::model
