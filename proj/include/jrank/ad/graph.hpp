#pragma once

#include "jrank/ad/array.hpp"

#include <cstdint>
#include <functional>
#include <memory>
#include <string>
#include <unordered_map>
#include <vector>

namespace jrank::ad {

/// A named trainable array together with the gradient of the last backward pass.
struct Parameter {
    std::string name;
    Array value;
    Array grad;
};

/// Ordered collection of parameters with stable addresses.
class ParameterSet {
public:
    Parameter& add(std::string name, Array init);

    Parameter& at(const std::string& name);
    const Parameter& at(const std::string& name) const;
    bool contains(const std::string& name) const { return by_name_.count(name) != 0; }

    std::size_t size() const noexcept { return params_.size(); }
    /// Total number of trainable scalars.
    std::size_t scalar_count() const noexcept;

    Parameter& operator[](std::size_t i) { return *params_[i]; }
    const Parameter& operator[](std::size_t i) const { return *params_[i]; }

    auto begin() { return params_.begin(); }
    auto end() { return params_.end(); }
    auto begin() const { return params_.begin(); }
    auto end() const { return params_.end(); }

    void zero_grad();

private:
    std::vector<std::unique_ptr<Parameter>> params_;
    std::unordered_map<std::string, std::size_t> by_name_;
};

class Graph;

/// Handle to a node of a Graph.
struct Var {
    Graph* graph = nullptr;
    std::uint32_t id = 0;

    const Array& value() const;
    double item() const { return value().item(); }
    std::size_t rows() const { return value().rows(); }
    std::size_t cols() const { return value().cols(); }
};

/// Tape of operations for reverse-mode differentiation. Nodes are appended in
/// topological order; backward walks them once in reverse.
///
/// A graph is confined to one thread. An inference graph records no backward
/// rules and never requires gradients.
class Graph {
public:
    enum class Mode { train, inference };

    explicit Graph(Mode mode = Mode::train) : mode_(mode) {}
    Graph(const Graph&) = delete;
    Graph& operator=(const Graph&) = delete;

    Var constant(Array value);
    Var constant(double v) { return constant(Array::scalar(v)); }
    /// Leaf bound to a parameter; one node per parameter per graph.
    Var param(Parameter& p);

    using BackwardFn = std::function<void(Graph&, std::uint32_t self)>;

    /// Appends an op result. `parents` decides whether the node needs a gradient.
    Var record(Array value, std::initializer_list<Var> parents, BackwardFn backward);
    Var record(Array value, const std::vector<Var>& parents, BackwardFn backward);

    const Array& value(Var v) const { return nodes_[v.id].value; }
    const Array& grad(Var v) const { return nodes_[v.id].grad; }
    bool requires_grad(Var v) const { return nodes_[v.id].requires_grad; }
    /// Gradient buffer of a node, for use inside backward rules only.
    Array& grad_buffer(std::uint32_t id) { return nodes_[id].grad; }
    const Array& value_of(std::uint32_t id) const { return nodes_[id].value; }
    bool requires_grad(std::uint32_t id) const { return nodes_[id].requires_grad; }

    /// Computes d loss / d node for every node and overwrites Parameter::grad of
    /// every parameter bound to this graph. Parameters not reached get zeros.
    void backward(Var loss);

    std::size_t node_count() const noexcept { return nodes_.size(); }
    Mode mode() const noexcept { return mode_; }

private:
    struct Node {
        Array value;
        Array grad;
        BackwardFn backward;
        Parameter* param = nullptr;
        bool requires_grad = false;
    };

    Var push(Node node);

    Mode mode_;
    std::vector<Node> nodes_;
    std::unordered_map<const Parameter*, std::uint32_t> param_nodes_;
};

} // namespace jrank::ad
