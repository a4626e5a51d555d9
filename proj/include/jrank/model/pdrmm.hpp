#pragma once

#include "jrank/ad/graph.hpp"
#include "jrank/model/features.hpp"
#include "jrank/rng.hpp"

#include <cstddef>
#include <string>

namespace jrank::model {

struct PdrmmConfig {
    std::size_t dimension = 30;
    std::size_t top_k = 5;
    std::size_t row_hidden = 8;
    std::size_t importance_hidden = 8;
    std::size_t final_hidden = 8;

    /// Throws ArgumentError when a size is zero.
    void validate() const;
};

/// Two-layer MLP with a ReLU hidden layer and a linear output.
struct Mlp {
    ad::Parameter* w1 = nullptr;
    ad::Parameter* b1 = nullptr;
    ad::Parameter* w2 = nullptr;
    ad::Parameter* b2 = nullptr;

    static void declare(ad::ParameterSet& params, const std::string& prefix, std::size_t in, std::size_t hidden,
                        std::size_t out, Rng& rng);
    static Mlp bind(ad::ParameterSet& params, const std::string& prefix, std::size_t in, std::size_t hidden,
                    std::size_t out);
    ad::Var operator()(ad::Graph& g, ad::Var x) const;
};

/// Context-sensitive term encoder: two window-3 convolutions, each
/// y = ReLU(conv(x)) + x.
struct ContextEncoder {
    ad::Parameter* w[2] = {nullptr, nullptr};
    ad::Parameter* b[2] = {nullptr, nullptr};

    static void declare(ad::ParameterSet& params, const std::string& prefix, std::size_t dim, Rng& rng);
    static ContextEncoder bind(ad::ParameterSet& params, const std::string& prefix, std::size_t dim);
    ad::Var operator()(ad::Graph& g, ad::Var x) const;
};

/// The three views and the pooled (n x 9) matrix, built entirely in the graph.
/// Used by tests; scoring reuses the precomputed static columns instead.
struct SimilarityViews {
    ad::Var s1;
    ad::Var s2;
    ad::Var s3;
};
SimilarityViews similarity_views(ad::Graph& g, ad::Var query_context, ad::Var text_context,
                                 const ad::Array& query_static, const ad::Array& text_static,
                                 std::span<const TermId> query_terms, std::span<const TermId> text_terms);
ad::Var pool_views(const SimilarityViews& views, std::size_t k);

/// One PDRMM instance: scores a text for a query from the pooled similarity
/// matrix, query-term importance, and `extra_features` hand-made features.
class Pdrmm {
public:
    Pdrmm() = default;

    /// Adds freshly initialized parameters named `prefix` + local name.
    static void declare(ad::ParameterSet& params, const std::string& prefix, const PdrmmConfig& config,
                        std::size_t extra_features, Rng& rng);
    /// Binds to existing parameters; throws ShapeError when shapes differ.
    Pdrmm(ad::ParameterSet& params, const std::string& prefix, const PdrmmConfig& config,
          std::size_t extra_features);

    struct Query {
        const QueryInput* input = nullptr;
        ad::Var context;    // (n x d)
        ad::Var importance; // (n x 1), sums to 1
    };
    /// Encodes the query once per graph.
    Query encode_query(ad::Graph& g, const QueryInput& query) const;

    ad::Var encode(ad::Graph& g, ad::Var embeddings) const { return encoder_(g, embeddings); }
    /// The pooled (n x 9) matrix for one text.
    ad::Var pooled(ad::Graph& g, const Query& q, const TextInput& text, const text::TermTable& table) const;
    /// r̂ = v·u, a (1 x 1).
    ad::Var relevance(ad::Graph& g, const Query& q, const TextInput& text, const text::TermTable& table) const;
    /// Final MLP over [r̂, extra]; `extra` is (1 x extra_features), ignored when there are none.
    ad::Var score(ad::Graph& g, const Query& q, const TextInput& text, const ad::Array& extra,
                  const text::TermTable& table) const;

    std::size_t extra_features() const noexcept { return extra_; }
    const PdrmmConfig& config() const noexcept { return config_; }
    const Mlp& final_mlp() const noexcept { return final_; }

private:
    PdrmmConfig config_;
    std::size_t extra_ = 0;
    ContextEncoder encoder_;
    Mlp row_;
    Mlp importance_;
    Mlp final_;
};

} // namespace jrank::model
