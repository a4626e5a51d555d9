#pragma once

#include "jrank/model/pdrmm.hpp"

#include <vector>

namespace jrank::model {

/// Independently disable the hand-made feature groups.
struct FeatureSwitches {
    bool sentence_extra = true;
    bool doc_extra = true;
};

struct JointOutput {
    ad::Var doc_score; // (1 x 1)
    ad::Var initial;   // (k x 1), document order
    ad::Var revised;   // (k x 1)
};

/// Layers above the sentence scorer: the document MLP over
/// [max sentence score, doc extras] and the shared revision
/// revised_i = w1 * initial_i + w2 * doc + bias.
class JointTop {
public:
    JointTop() = default;
    static void declare(ad::ParameterSet& params, const PdrmmConfig& config, const FeatureSwitches& switches,
                        Rng& rng);
    JointTop(ad::ParameterSet& params, const PdrmmConfig& config, const FeatureSwitches& switches);

    ad::Var doc_score(ad::Graph& g, ad::Var initial, const DocExtra& extra) const;
    ad::Var revise(ad::Graph& g, ad::Var initial, ad::Var doc_score) const;

    ad::Parameter& revision_weight() const { return *revise_w_; }
    ad::Parameter& revision_bias() const { return *revise_b_; }
    const Mlp& doc_mlp() const noexcept { return doc_; }

private:
    bool doc_extra_ = true;
    Mlp doc_;
    ad::Parameter* revise_w_ = nullptr; // (2 x 1)
    ad::Parameter* revise_b_ = nullptr; // (1 x 1)
};

/// Initial score of every sentence of the candidate, as (k x 1). Throws
/// ArgumentError when the candidate has no sentences.
ad::Var sentence_scores(ad::Graph& g, const Pdrmm& scorer, const Pdrmm::Query& q, const CandidateInput& cand,
                        const FeatureNorm& norm, const text::TermTable& table);

JointOutput joint_forward(ad::Graph& g, const Pdrmm& scorer, const JointTop& top, const Pdrmm::Query& q,
                          const CandidateInput& cand, const FeatureNorm& norm, const text::TermTable& table);

/// Gold labels of the candidate's sentences as a (k x 1).
ad::Array sentence_labels(const CandidateInput& cand);

/// max(0, margin - (pos - neg)).
ad::Var pairwise_hinge(ad::Var pos, ad::Var neg, double margin);

/// Hinge on the document scores plus lambda times the summed cross-entropy of
/// sigmoid(revised) over the sentences of both documents. Throws
/// ArgumentError unless margin > 0 and lambda > 0, ShapeError when a label
/// list does not match the sentence count.
ad::Var joint_loss(const JointOutput& pos, const JointOutput& neg, const ad::Array& pos_labels,
                   const ad::Array& neg_labels, double margin, double lambda_snip);

} // namespace jrank::model
