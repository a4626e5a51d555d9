#include "jrank/ad/gradcheck.hpp"

#include "jrank/error.hpp"

#include <algorithm>
#include <cmath>
#include <vector>

namespace jrank::ad {

namespace {
double evaluate(const std::function<Var(Graph&)>& build) {
    Graph g(Graph::Mode::inference);
    return build(g).item();
}
} // namespace

GradCheckReport grad_check(const std::function<Var(Graph&)>& build, ParameterSet& params,
                           double tolerance, double step) {
    if (!(tolerance > 0.0)) throw ArgumentError("grad_check: tolerance must be positive");
    GradCheckReport report;
    {
        params.zero_grad();
        Graph g;
        Var loss = build(g);
        g.backward(loss);
    }
    std::vector<Array> analytic;
    for (const auto& p : params) analytic.push_back(p->grad);

    const double f0 = evaluate(build);
    for (std::size_t pi = 0; pi < params.size(); ++pi) {
        Parameter& p = params[pi];
        for (std::size_t k = 0; k < p.value.size(); ++k) {
            const double orig = p.value[k];
            p.value[k] = orig + step;
            const double fp = evaluate(build);
            p.value[k] = orig - step;
            const double fm = evaluate(build);
            p.value[k] = orig;

            const double a = analytic[pi][k];
            const double central = (fp - fm) / (2.0 * step);
            const double forward = (fp - f0) / step;
            const double backward = (f0 - fm) / step;
            const double err = std::abs(a - central);
            const double rel = err / std::max({std::abs(a), std::abs(central), 1e-5});
            if (rel >= tolerance && std::abs(forward - backward) >= err) {
                ++report.excluded;
                continue;
            }
            ++report.checked;
            if (rel > report.max_relative_error) {
                report.max_relative_error = rel;
                report.worst_parameter = p.name;
                report.worst_index = k;
            }
        }
    }
    report.passed = report.max_relative_error < tolerance;
    return report;
}

} // namespace jrank::ad
