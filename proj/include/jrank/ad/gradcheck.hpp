#pragma once

#include "jrank/ad/graph.hpp"

#include <cstddef>
#include <functional>
#include <string>

namespace jrank::ad {

struct GradCheckReport {
    double max_relative_error = 0.0;
    std::string worst_parameter;
    std::size_t worst_index = 0;
    std::size_t checked = 0;
    /// Entries skipped because the loss is not differentiable within one step
    /// (ReLU at 0, ties in max / top-k selection).
    std::size_t excluded = 0;
    bool passed = false;
};

/// Compares analytic gradients with central differences of step `step` for
/// every entry of every parameter. `build` must construct the scalar loss in
/// the given graph from the current parameter values.
///
/// The relative error of an entry is |a - n| / max(|a|, |n|, 1e-5). An entry
/// over tolerance is treated as a kink and excluded when its one-sided
/// differences disagree by at least the central-vs-analytic discrepancy: a
/// smooth function cannot do that, a wrong derivative does not need to.
GradCheckReport grad_check(const std::function<Var(Graph&)>& build, ParameterSet& params,
                           double tolerance, double step = 1e-5);

} // namespace jrank::ad
