#pragma once

#include <cstdint>
#include <vector>

#include "srl/graph.hpp"

namespace srl {

struct AdamConfig {
    double lr = 3e-4f;
    double beta1 = 0.9f;
    double beta2 = 0.999f;
    double eps = 1e-8f;
};

// Adam with bias correction. A parameter whose accumulated gradient contains
// a non-finite entry is skipped for that step (and the incident counted);
// the step counter still advances. Gradients are cleared after each step.
class Adam {
public:
    explicit Adam(ParamStore& params, AdamConfig cfg = {});

    void step();

    std::int64_t steps_taken() const { return t_; }
    std::int64_t skipped_updates() const { return skipped_; }

private:
    ParamStore* params_;
    AdamConfig cfg_;
    std::vector<Tensor> m_;
    std::vector<Tensor> v_;
    std::int64_t t_ = 0;
    std::int64_t skipped_ = 0;

    void grow_state();
};

}  // namespace srl
