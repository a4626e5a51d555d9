#include "jrank/ad/graph.hpp"

#include "jrank/error.hpp"

namespace jrank::ad {

Parameter& ParameterSet::add(std::string name, Array init) {
    if (by_name_.count(name)) throw ArgumentError("duplicate parameter name: " + name);
    auto p = std::make_unique<Parameter>();
    p->name = name;
    p->grad = Array(init.rows(), init.cols());
    p->value = std::move(init);
    by_name_.emplace(std::move(name), params_.size());
    params_.push_back(std::move(p));
    return *params_.back();
}

Parameter& ParameterSet::at(const std::string& name) {
    auto it = by_name_.find(name);
    if (it == by_name_.end()) throw ArgumentError("unknown parameter: " + name);
    return *params_[it->second];
}

const Parameter& ParameterSet::at(const std::string& name) const {
    auto it = by_name_.find(name);
    if (it == by_name_.end()) throw ArgumentError("unknown parameter: " + name);
    return *params_[it->second];
}

std::size_t ParameterSet::scalar_count() const noexcept {
    std::size_t n = 0;
    for (const auto& p : params_) n += p->value.size();
    return n;
}

void ParameterSet::zero_grad() {
    for (auto& p : params_) p->grad.fill(0.0);
}

const Array& Var::value() const { return graph->value(*this); }

Var Graph::push(Node node) {
    nodes_.push_back(std::move(node));
    return Var{this, static_cast<std::uint32_t>(nodes_.size() - 1)};
}

Var Graph::constant(Array value) {
    Node n;
    n.value = std::move(value);
    return push(std::move(n));
}

Var Graph::param(Parameter& p) {
    if (auto it = param_nodes_.find(&p); it != param_nodes_.end()) return Var{this, it->second};
    Node n;
    n.value = p.value;
    n.param = &p;
    n.requires_grad = mode_ == Mode::train;
    Var v = push(std::move(n));
    param_nodes_.emplace(&p, v.id);
    return v;
}

Var Graph::record(Array value, std::initializer_list<Var> parents, BackwardFn backward) {
    Node n;
    n.value = std::move(value);
    for (const Var& p : parents) {
        if (p.graph != this) throw ArgumentError("operand belongs to a different graph");
        n.requires_grad = n.requires_grad || nodes_[p.id].requires_grad;
    }
    if (n.requires_grad) n.backward = std::move(backward);
    return push(std::move(n));
}

Var Graph::record(Array value, const std::vector<Var>& parents, BackwardFn backward) {
    Node n;
    n.value = std::move(value);
    for (const Var& p : parents) {
        if (p.graph != this) throw ArgumentError("operand belongs to a different graph");
        n.requires_grad = n.requires_grad || nodes_[p.id].requires_grad;
    }
    if (n.requires_grad) n.backward = std::move(backward);
    return push(std::move(n));
}

void Graph::backward(Var loss) {
    if (loss.graph != this) throw ArgumentError("backward: loss belongs to a different graph");
    const Array& lv = nodes_[loss.id].value;
    if (!lv.is_scalar()) throw ShapeError("backward: loss must be (1x1), got " + lv.shape_string());

    for (auto& n : nodes_) {
        if (n.requires_grad) n.grad = Array(n.value.rows(), n.value.cols());
        else n.grad = Array();
    }
    if (nodes_[loss.id].requires_grad) nodes_[loss.id].grad[0] = 1.0;

    for (std::size_t i = loss.id + 1; i-- > 0;) {
        Node& n = nodes_[i];
        if (n.backward) n.backward(*this, static_cast<std::uint32_t>(i));
    }
    for (const Node& n : nodes_) {
        if (!n.param) continue;
        n.param->grad = n.requires_grad ? n.grad : Array(n.value.rows(), n.value.cols());
    }
}

} // namespace jrank::ad
