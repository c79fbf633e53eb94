#pragma once

#include <vector>

#include "srl/encoder.hpp"
#include "srl/graph.hpp"

namespace srl {

struct RefinerConfig {
    int d_h = 428;
    int layers = 3;
    int d_g = 200;
    int d_r = 200;
    int d_pi = 128;
    bool structured = true;
    bool tied = true;
    double dropout = 0.3f;
    double rdropout = 0.3f;
};

// Iterative corrector over a frozen scorer's logits. Each iteration reads the
// previous role/sense distributions plus features of the input sentence and
// adds logit corrections; the structured variant additionally sees, per token,
// the total role mass of every *other* token, and, for the sense update, the
// total role mass overall. Output projections are leading slices of the input
// projections (one storage, two views) unless `tied` is off. Correctors are
// zero-initialized, so a fresh refiner reproduces its input distributions.
class RefinerModel {
public:
    RefinerModel(ParamStore& store, int input_width, int n_roles, RefinerConfig cfg,
                 Rng& init_rng);

    struct Step {
        Var role_logits = -1;  // n x r (corrected; step 0 carries the base logits)
        Var sense_logits = -1; // m
        Var R = -1;            // n x r row-stochastic
        Var P = -1;            // m simplex
    };

    // Encoder + feature dropout over the embedded sentence; shareable across
    // predicates of one sentence within one graph.
    Var encode_features(Graph& g, Var x, bool train, Rng& rng) const;

    // steps[0] = (base logits, r0, p0); steps[t] for t=1..iterations applies
    // the corrector to steps[t-1]. Encoder features are computed once.
    // `pi_matrix` is the predicate's m x d_pi sense embedding (all zeros for
    // lemmas without a learned inventory).
    std::vector<Step> iterate_from(Graph& g, Var feats, Var i_alpha, Var i_pi, Var pi_matrix,
                                   Var r0, Var p0, int j, int iterations) const;
    std::vector<Step> iterate(Graph& g, Var x, Var i_alpha, Var i_pi, Var pi_matrix,
                              Var r0, Var p0, int j, int iterations, bool train,
                              Rng& rng) const;

    int role_input_width() const;
    int sense_input_width() const;
    int n_roles() const { return n_roles_; }
    const RefinerConfig& config() const { return cfg_; }
    ParamStore& params() { return *store_; }
    const ParamStore& params() const { return *store_; }

private:
    ParamStore* store_;
    int input_width_;
    int n_roles_;
    RefinerConfig cfg_;
    Encoder enc_;
};

}  // namespace srl
