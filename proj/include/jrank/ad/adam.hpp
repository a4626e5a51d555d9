#pragma once

#include "jrank/ad/graph.hpp"

#include <cstdint>
#include <vector>

namespace jrank::ad {

struct AdamConfig {
    double learning_rate = 1e-3;
    double beta1 = 0.9;
    double beta2 = 0.999;
    double epsilon = 1e-8;
};

/// Adam with bias correction. Moments are kept per parameter, in the order of
/// the ParameterSet the optimizer was created for.
class Adam {
public:
    Adam(const ParameterSet& params, AdamConfig config = {});

    /// Applies one update from each Parameter::grad. Throws NumericError naming
    /// the parameter if any gradient entry is not finite; nothing is updated then.
    void step(ParameterSet& params);

    std::uint64_t steps() const noexcept { return steps_; }
    const AdamConfig& config() const noexcept { return config_; }
    const Array& first_moment(std::size_t i) const { return m_[i]; }
    const Array& second_moment(std::size_t i) const { return v_[i]; }

private:
    AdamConfig config_;
    std::uint64_t steps_ = 0;
    std::vector<Array> m_;
    std::vector<Array> v_;
};

/// Rescales all gradients so their joint L2 norm is at most `max_norm`.
/// Returns the norm before clipping.
double clip_global_norm(ParameterSet& params, double max_norm);

} // namespace jrank::ad
