#include "jrank/ad/adam.hpp"

#include "jrank/error.hpp"

#include <cmath>

namespace jrank::ad {

Adam::Adam(const ParameterSet& params, AdamConfig config) : config_(config) {
    if (!(config_.learning_rate > 0.0)) throw ArgumentError("Adam: learning rate must be positive");
    for (const auto& p : params) {
        m_.emplace_back(p->value.rows(), p->value.cols());
        v_.emplace_back(p->value.rows(), p->value.cols());
    }
}

void Adam::step(ParameterSet& params) {
    if (params.size() != m_.size()) throw ShapeError("Adam: parameter set changed since construction");
    for (std::size_t i = 0; i < params.size(); ++i) {
        const Parameter& p = params[i];
        if (!p.grad.same_shape(p.value) || !p.value.same_shape(m_[i]))
            throw ShapeError("Adam: gradient shape of " + p.name + " " + p.grad.shape_string() +
                             " vs value " + p.value.shape_string());
        if (!p.grad.all_finite()) throw NumericError("Adam: non-finite gradient in parameter " + p.name);
    }
    ++steps_;
    const double t = static_cast<double>(steps_);
    const double c1 = 1.0 - std::pow(config_.beta1, t);
    const double c2 = 1.0 - std::pow(config_.beta2, t);
    for (std::size_t i = 0; i < params.size(); ++i) {
        Parameter& p = params[i];
        Array& m = m_[i];
        Array& v = v_[i];
        for (std::size_t k = 0; k < p.value.size(); ++k) {
            const double g = p.grad[k];
            m[k] = config_.beta1 * m[k] + (1.0 - config_.beta1) * g;
            v[k] = config_.beta2 * v[k] + (1.0 - config_.beta2) * g * g;
            const double mhat = m[k] / c1;
            const double vhat = v[k] / c2;
            p.value[k] -= config_.learning_rate * mhat / (std::sqrt(vhat) + config_.epsilon);
        }
    }
}

double clip_global_norm(ParameterSet& params, double max_norm) {
    double sq = 0.0;
    for (const auto& p : params)
        for (double g : p->grad.values()) sq += g * g;
    const double norm = std::sqrt(sq);
    if (norm > max_norm && norm > 0.0) {
        const double f = max_norm / norm;
        for (auto& p : params)
            for (double& g : p->grad.values()) g *= f;
    }
    return norm;
}

} // namespace jrank::ad
