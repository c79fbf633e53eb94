#include "srl/gradcheck.hpp"

#include <algorithm>
#include <cmath>

#include "srl/common.hpp"

namespace srl {

namespace {

double eval_loss(ParamStore& params, const std::function<Var(Graph&)>& build) {
    (void)params;
    Graph g;
    Var loss = build(g);
    return static_cast<double>(g.value(loss).item());
}

std::uint64_t name_hash(const std::string& s) {
    std::uint64_t h = 1469598103934665603ULL;
    for (unsigned char c : s) {
        h ^= c;
        h *= 1099511628211ULL;
    }
    return h;
}

}  // namespace

GradCheckReport gradient_check(ParamStore& params,
                               const std::function<Var(Graph&)>& build,
                               double eps) {
    require(eps > 0.0, "gradient_check: eps must be positive, got ", eps);
    params.zero_grads();
    {
        Graph g;
        Var loss = build(g);
        g.backward(loss);
    }
    GradCheckReport report;
    for (std::size_t pi = 0; pi < params.count(); ++pi) {
        Param& p = params.at(pi);
        std::vector<double> dir(p.value.size(), 0.0);
        double norm = 0.0;
        for (std::size_t i = 0; i < p.grad.size(); ++i) {
            dir[i] = p.grad.data()[i];
            norm += dir[i] * dir[i];
        }
        norm = std::sqrt(norm);
        if (norm == 0.0) {
            Rng fallback(name_hash(p.name));
            norm = 0.0;
            for (auto& d : dir) {
                d = fallback.normal();
                norm += d * d;
            }
            norm = std::sqrt(norm);
        }
        for (auto& d : dir) d /= norm;

        double analytic = 0.0;
        for (std::size_t i = 0; i < p.grad.size(); ++i)
            analytic += static_cast<double>(p.grad.data()[i]) * dir[i];

        Tensor saved = p.value;
        for (std::size_t i = 0; i < p.value.size(); ++i)
            p.value.values()[i] = static_cast<double>(saved.data()[i] + eps * dir[i]);
        double plus = eval_loss(params, build);
        for (std::size_t i = 0; i < p.value.size(); ++i)
            p.value.values()[i] = static_cast<double>(saved.data()[i] - eps * dir[i]);
        double minus = eval_loss(params, build);
        p.value = saved;

        double numeric = (plus - minus) / (2.0 * eps);
        double rel = std::fabs(analytic - numeric) /
                     std::max(1e-8, std::fabs(analytic) + std::fabs(numeric));
        report.entries.push_back({p.name, analytic, numeric, rel});
        if (rel > report.max_rel_err) {
            report.max_rel_err = rel;
            report.worst = p.name;
        }
    }
    params.zero_grads();
    return report;
}

}  // namespace srl
