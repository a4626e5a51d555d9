#include "jrank/model/pdrmm.hpp"

#include "jrank/ad/ops.hpp"
#include "jrank/error.hpp"

#include <algorithm>
#include <cmath>

namespace jrank::model {

void PdrmmConfig::validate() const {
    if (dimension == 0 || top_k == 0 || row_hidden == 0 || importance_hidden == 0 || final_hidden == 0)
        throw ArgumentError("PDRMM sizes must all be at least 1");
}

namespace {

ad::Array xavier(std::size_t in, std::size_t out, Rng& rng, double gain = 1.0) {
    const double limit = gain * std::sqrt(6.0 / static_cast<double>(in + out));
    ad::Array a(in, out);
    for (std::size_t i = 0; i < a.size(); ++i) a[i] = rng.uniform(-limit, limit);
    return a;
}

ad::Parameter* bind_one(ad::ParameterSet& params, const std::string& name, std::size_t rows, std::size_t cols) {
    if (!params.contains(name)) throw ShapeError("missing parameter " + name);
    auto& p = params.at(name);
    if (p.value.rows() != rows || p.value.cols() != cols)
        throw ShapeError("parameter " + name + " has shape " + p.value.shape_string() + ", expected (" +
                         std::to_string(rows) + " x " + std::to_string(cols) + ")");
    return &p;
}

} // namespace

void Mlp::declare(ad::ParameterSet& params, const std::string& prefix, std::size_t in, std::size_t hidden,
                  std::size_t out, Rng& rng) {
    params.add(prefix + "w1", xavier(in, hidden, rng));
    params.add(prefix + "b1", ad::Array(1, hidden, 0.01));
    params.add(prefix + "w2", xavier(hidden, out, rng));
    params.add(prefix + "b2", ad::Array(1, out, 0.0));
}

Mlp Mlp::bind(ad::ParameterSet& params, const std::string& prefix, std::size_t in, std::size_t hidden,
              std::size_t out) {
    return {bind_one(params, prefix + "w1", in, hidden), bind_one(params, prefix + "b1", 1, hidden),
            bind_one(params, prefix + "w2", hidden, out), bind_one(params, prefix + "b2", 1, out)};
}

ad::Var Mlp::operator()(ad::Graph& g, ad::Var x) const {
    const auto h = ad::relu(ad::linear(x, g.param(*w1), g.param(*b1)));
    return ad::linear(h, g.param(*w2), g.param(*b2));
}

void ContextEncoder::declare(ad::ParameterSet& params, const std::string& prefix, std::size_t dim, Rng& rng) {
    for (int l = 1; l <= 2; ++l) {
        params.add(prefix + "conv" + std::to_string(l) + ".w", xavier(3 * dim, dim, rng, 0.5));
        params.add(prefix + "conv" + std::to_string(l) + ".b", ad::Array(1, dim, 0.0));
    }
}

ContextEncoder ContextEncoder::bind(ad::ParameterSet& params, const std::string& prefix, std::size_t dim) {
    ContextEncoder e;
    for (int l = 0; l < 2; ++l) {
        e.w[l] = bind_one(params, prefix + "conv" + std::to_string(l + 1) + ".w", 3 * dim, dim);
        e.b[l] = bind_one(params, prefix + "conv" + std::to_string(l + 1) + ".b", 1, dim);
    }
    return e;
}

ad::Var ContextEncoder::operator()(ad::Graph& g, ad::Var x) const {
    if (x.rows() == 0) throw ShapeError("context encoder: empty sequence");
    for (int l = 0; l < 2; ++l) x = ad::add(ad::relu(ad::conv1d_window3(x, g.param(*w[l]), g.param(*b[l]))), x);
    return x;
}

SimilarityViews similarity_views(ad::Graph& g, ad::Var query_context, ad::Var text_context,
                                 const ad::Array& query_static, const ad::Array& text_static,
                                 std::span<const TermId> query_terms, std::span<const TermId> text_terms) {
    return {ad::cosine_matrix(query_context, text_context),
            ad::cosine_matrix(g.constant(query_static), g.constant(text_static)),
            g.constant(exact_match(query_terms, text_terms))};
}

namespace {

ad::Var pool3(ad::Var s, std::size_t k) {
    const std::size_t kk = std::clamp<std::size_t>(k, 1, s.cols());
    return ad::concat_cols({ad::row_max(s), ad::row_mean(s), ad::row_topk_mean(s, kk)});
}

} // namespace

ad::Var pool_views(const SimilarityViews& v, std::size_t k) {
    return ad::concat_cols({pool3(v.s1, k), pool3(v.s2, k), pool3(v.s3, k)});
}

void Pdrmm::declare(ad::ParameterSet& params, const std::string& prefix, const PdrmmConfig& c,
                    std::size_t extra_features, Rng& rng) {
    c.validate();
    ContextEncoder::declare(params, prefix, c.dimension, rng);
    Mlp::declare(params, prefix + "row.", 9, c.row_hidden, 1, rng);
    Mlp::declare(params, prefix + "importance.", c.dimension + 1, c.importance_hidden, 1, rng);
    Mlp::declare(params, prefix + "final.", 1 + extra_features, c.final_hidden, 1, rng);
}

Pdrmm::Pdrmm(ad::ParameterSet& params, const std::string& prefix, const PdrmmConfig& c, std::size_t extra_features)
    : config_(c), extra_(extra_features) {
    c.validate();
    encoder_ = ContextEncoder::bind(params, prefix, c.dimension);
    row_ = Mlp::bind(params, prefix + "row.", 9, c.row_hidden, 1);
    importance_ = Mlp::bind(params, prefix + "importance.", c.dimension + 1, c.importance_hidden, 1);
    final_ = Mlp::bind(params, prefix + "final.", 1 + extra_features, c.final_hidden, 1);
}

Pdrmm::Query Pdrmm::encode_query(ad::Graph& g, const QueryInput& query) const {
    if (query.terms.empty()) throw ArgumentError("PDRMM: empty query");
    if (query.embeddings.cols() != config_.dimension)
        throw ShapeError("PDRMM: query embeddings " + query.embeddings.shape_string() + " do not match dimension " +
                         std::to_string(config_.dimension));
    Query q;
    q.input = &query;
    q.context = encode(g, g.constant(query.embeddings));
    const auto logits = importance_(g, ad::concat_cols({q.context, g.constant(query.idf)}));
    q.importance = ad::softmax(logits, 0);
    return q;
}

ad::Var Pdrmm::pooled(ad::Graph& g, const Query& q, const TextInput& text, const text::TermTable& table) const {
    if (text.terms.empty()) throw ArgumentError("PDRMM: empty text");
    if (text.static_pooled.rows() != q.input->terms.size() || text.static_pooled.cols() != 6)
        throw ShapeError("PDRMM: static views " + text.static_pooled.shape_string() + " do not fit a " +
                         std::to_string(q.input->terms.size()) + "-term query");
    const auto context = encode(g, g.constant(table.embed(text.terms)));
    return ad::concat_cols({pool3(ad::cosine_matrix(q.context, context), config_.top_k),
                            g.constant(text.static_pooled)});
}

ad::Var Pdrmm::relevance(ad::Graph& g, const Query& q, const TextInput& text, const text::TermTable& table) const {
    const auto v = row_(g, pooled(g, q, text, table));
    return ad::dot(v, q.importance);
}

ad::Var Pdrmm::score(ad::Graph& g, const Query& q, const TextInput& text, const ad::Array& extra,
                     const text::TermTable& table) const {
    auto r = relevance(g, q, text, table);
    if (extra_ > 0) {
        if (extra.rows() != 1 || extra.cols() != extra_)
            throw ShapeError("PDRMM: extra features " + extra.shape_string() + ", expected (1 x " +
                             std::to_string(extra_) + ")");
        r = ad::concat_cols({r, g.constant(extra)});
    }
    return final_(g, r);
}

} // namespace jrank::model
