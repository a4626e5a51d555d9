#include "jrank/model/joint.hpp"

#include "jrank/ad/ops.hpp"
#include "jrank/error.hpp"

namespace jrank::model {

namespace {

std::size_t doc_inputs(const FeatureSwitches& s) { return 1 + (s.doc_extra ? kDocExtraCount : 0); }

} // namespace

void JointTop::declare(ad::ParameterSet& params, const PdrmmConfig& config, const FeatureSwitches& switches,
                       Rng& rng) {
    Mlp::declare(params, "doc.", doc_inputs(switches), config.final_hidden, 1, rng);
    // Starts as revised = initial + doc.
    params.add("revise.w", ad::Array(2, 1, 1.0));
    params.add("revise.b", ad::Array(1, 1, 0.0));
}

JointTop::JointTop(ad::ParameterSet& params, const PdrmmConfig& config, const FeatureSwitches& switches)
    : doc_extra_(switches.doc_extra) {
    doc_ = Mlp::bind(params, "doc.", doc_inputs(switches), config.final_hidden, 1);
    if (!params.contains("revise.w") || !params.contains("revise.b")) throw ShapeError("missing revision parameters");
    revise_w_ = &params.at("revise.w");
    revise_b_ = &params.at("revise.b");
    if (revise_w_->value.rows() != 2 || revise_w_->value.cols() != 1 || !revise_b_->value.is_scalar())
        throw ShapeError("revision parameters have the wrong shape");
}

ad::Var JointTop::doc_score(ad::Graph& g, ad::Var initial, const DocExtra& extra) const {
    auto best = ad::row_max(ad::transpose(initial));
    if (doc_extra_) {
        ad::Array e(1, kDocExtraCount);
        for (std::size_t i = 0; i < kDocExtraCount; ++i) e(0, i) = extra[i];
        best = ad::concat_cols({best, g.constant(std::move(e))});
    }
    return doc_(g, best);
}

ad::Var JointTop::revise(ad::Graph& g, ad::Var initial, ad::Var doc_score) const {
    const auto inputs = ad::concat_cols({initial, ad::repeat_rows(doc_score, initial.rows())});
    return ad::linear(inputs, g.param(*revise_w_), g.param(*revise_b_));
}

ad::Var sentence_scores(ad::Graph& g, const Pdrmm& scorer, const Pdrmm::Query& q, const CandidateInput& cand,
                        const FeatureNorm& norm, const text::TermTable& table) {
    if (cand.sentences.empty()) throw ArgumentError("document has no sentences to score");
    std::vector<ad::Var> scores;
    scores.reserve(cand.sentences.size());
    const ad::Array none(1, 0);
    for (const auto& s : cand.sentences)
        scores.push_back(scorer.score(g, q, s.text, scorer.extra_features() ? norm.apply(s.extra) : none, table));
    return scores.size() == 1 ? scores[0] : ad::concat_rows(scores);
}

JointOutput joint_forward(ad::Graph& g, const Pdrmm& scorer, const JointTop& top, const Pdrmm::Query& q,
                          const CandidateInput& cand, const FeatureNorm& norm, const text::TermTable& table) {
    JointOutput out;
    out.initial = sentence_scores(g, scorer, q, cand, norm, table);
    out.doc_score = top.doc_score(g, out.initial, cand.extra);
    out.revised = top.revise(g, out.initial, out.doc_score);
    return out;
}

ad::Array sentence_labels(const CandidateInput& cand) {
    ad::Array y(cand.sentences.size(), 1);
    for (std::size_t i = 0; i < cand.sentences.size(); ++i) y(i, 0) = cand.sentences[i].gold ? 1.0 : 0.0;
    return y;
}

ad::Var pairwise_hinge(ad::Var pos, ad::Var neg, double margin) { return ad::hinge(ad::sub(pos, neg), margin); }

ad::Var joint_loss(const JointOutput& pos, const JointOutput& neg, const ad::Array& pos_labels,
                   const ad::Array& neg_labels, double margin, double lambda_snip) {
    if (!(margin > 0.0)) throw ArgumentError("joint loss: margin must be positive");
    if (!(lambda_snip > 0.0)) throw ArgumentError("joint loss: lambda_snip must be positive");
    if (pos_labels.rows() != pos.revised.rows() || neg_labels.rows() != neg.revised.rows())
        throw ShapeError("joint loss: labels " + pos_labels.shape_string() + " / " + neg_labels.shape_string() +
                         " do not match sentences " + pos.revised.value().shape_string() + " / " +
                         neg.revised.value().shape_string());
    const auto doc = pairwise_hinge(pos.doc_score, neg.doc_score, margin);
    const auto snip = ad::add(ad::bce_with_logits(pos.revised, pos_labels), ad::bce_with_logits(neg.revised, neg_labels));
    return ad::add(doc, ad::scale(snip, lambda_snip));
}

} // namespace jrank::model
