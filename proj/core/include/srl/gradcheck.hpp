#pragma once

#include <functional>
#include <string>
#include <vector>

#include "srl/graph.hpp"

namespace srl {

struct GradCheckEntry {
    std::string name;
    double analytic = 0.0;
    double numeric = 0.0;
    double rel_err = 0.0;
};

struct GradCheckReport {
    std::vector<GradCheckEntry> entries;
    double max_rel_err = 0.0;
    std::string worst;

    bool within(double tol) const { return max_rel_err < tol; }
};

// Central-difference check of d(loss)/d(param) for every parameter in the
// store. `build` must construct the same graph on every call (fix any
// internal RNG seeds). Per parameter, the check perturbs the values along
// the normalized analytic gradient direction and compares the directional
// derivative against (f(x+eps*d) - f(x-eps*d)) / (2*eps); a parameter with
// zero analytic gradient falls back to a fixed pseudo-random direction.
// Relative error is |analytic-numeric| / max(1e-8, |analytic|+|numeric|).
GradCheckReport gradient_check(ParamStore& params,
                               const std::function<Var(Graph&)>& build,
                               double eps = 1e-3);

}  // namespace srl
