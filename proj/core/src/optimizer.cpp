#include "srl/optimizer.hpp"

#include <cmath>
#include <iostream>

#include "srl/common.hpp"

namespace srl {

Adam::Adam(ParamStore& params, AdamConfig cfg) : params_(&params), cfg_(cfg) {
    require(0.0f < cfg_.beta1 && cfg_.beta1 < 1.0f, "beta1 out of (0,1): ", cfg_.beta1);
    require(0.0f < cfg_.beta2 && cfg_.beta2 < 1.0f, "beta2 out of (0,1): ", cfg_.beta2);
    require(cfg_.lr > 0.0f, "learning rate must be positive, got ", cfg_.lr);
    grow_state();
}

void Adam::grow_state() {
    while (m_.size() < params_->count()) {
        const Param& p = params_->at(m_.size());
        m_.push_back(Tensor::zeros(p.value.shape()));
        v_.push_back(Tensor::zeros(p.value.shape()));
    }
}

void Adam::step() {
    grow_state();
    ++t_;
    double bc1 = 1.0 - std::pow(static_cast<double>(cfg_.beta1), static_cast<double>(t_));
    double bc2 = 1.0 - std::pow(static_cast<double>(cfg_.beta2), static_cast<double>(t_));
    for (std::size_t pi = 0; pi < params_->count(); ++pi) {
        Param& p = params_->at(pi);
        if (!p.grad.all_finite()) {
            ++skipped_;
            std::cerr << "adam: non-finite gradient, skipping update of " << p.name
                      << " at step " << t_ << "\n";
            p.grad.fill(0.0f);
            continue;
        }
        Tensor& m = m_[pi];
        Tensor& v = v_[pi];
        bool row_freeze = !p.frozen_rows.empty() && p.value.rank() == 2;
        int cols = row_freeze ? p.value.cols() : 0;
        for (std::size_t i = 0; i < p.value.size(); ++i) {
            if (row_freeze && p.frozen_rows[i / static_cast<std::size_t>(cols)]) continue;
            double g = p.grad.data()[i];
            m.values()[i] = cfg_.beta1 * m.data()[i] + (1.0f - cfg_.beta1) * g;
            v.values()[i] = cfg_.beta2 * v.data()[i] + (1.0f - cfg_.beta2) * g * g;
            double mhat = static_cast<double>(m.data()[i]) / bc1;
            double vhat = static_cast<double>(v.data()[i]) / bc2;
            p.value.values()[i] -= static_cast<double>(
                static_cast<double>(cfg_.lr) * mhat / (std::sqrt(vhat) + cfg_.eps));
        }
        p.grad.fill(0.0f);
    }
}

}  // namespace srl
