#pragma once

#include <cstdint>
#include <iosfwd>
#include <vector>

#include "srl/baseline.hpp"
#include "srl/eval.hpp"
#include "srl/refiner.hpp"

namespace srl {

struct TrainOptions {
    int epochs = 600;
    int batch = 32;
    double lr = 3e-4f;
    int patience = 25;
    std::uint64_t seed = 1;
    int iterations = 2;          // refinement steps unrolled in stage 2
    double lambda_role = 5.0f;    // Gumbel scale on initial role distributions
    double lambda_sense = 50.0f;  // Gumbel scale on initial sense distributions
    bool gumbel = true;
    int threads = 1;
};

struct TrainResult {
    double best_dev_f1 = -1.0;
    int best_epoch = 0;
    int epochs_run = 0;
    double role_flip_fraction = -1.0;   // stage 2 only: measured Gumbel effect
    double sense_flip_fraction = -1.0;  // stage 2 only
};

// Stage 1: Adam on the margin loss, one dev evaluation per epoch, early
// stopping on dev labeled F1. Ties refresh the retained snapshot so later
// equal-F1 epochs win; the best snapshot is restored before returning.
// Non-finite losses abort the epoch with a log line naming the batch.
TrainResult train_baseline(BaselineModel& model, const Corpus& train, const Corpus& dev,
                           const TrainOptions& opts, std::ostream& log);

// Baseline outputs for one instance, computed once and reused across stage-2
// epochs (the baseline is frozen, so these never change).
struct FrozenInstance {
    Tensor x;        // n x d_x embedded sentence
    Tensor i_alpha;  // n x r role logits
    Tensor i_pi;     // m sense logits
    Tensor pi;       // m x d_pi sense embedding (zeros for unknown lemmas)
    std::vector<std::string> inventory;
    std::vector<int> gold_roles;
    int gold_sense = -1;  // -1: gold sense outside the inventory
    int j = 0;
    int sentence_index = 0;
};

std::vector<FrozenInstance> freeze_baseline_outputs(const BaselineModel& model,
                                                    const Corpus& corpus, int threads);

// Stage 2: trains only the refiner parameters against frozen baseline
// outputs. Training draws the initial distributions from Gumbel-perturbed
// logits; later iterations and all evaluation use plain softmax. The
// measured argmax flip fractions are logged and returned.
TrainResult train_refiner(RefinerModel& refiner, const BaselineModel& baseline,
                          const Corpus& train, const Corpus& dev, const TrainOptions& opts,
                          std::ostream& log);

// Fraction of tokens (instances) whose argmax role (sense) changes when the
// frozen logits are perturbed as softmax(logits + lambda * gumbel).
double gumbel_flip_fraction(const std::vector<FrozenInstance>& frozen, double lambda, Rng& rng);
double gumbel_sense_flip_fraction(const std::vector<FrozenInstance>& frozen, double lambda,
                                  Rng& rng);

// Deterministic decode. iterations = 0 or a null refiner reproduces the
// baseline decision bit for bit.
std::vector<InstancePrediction> predict_instances(const BaselineModel& model,
                                                  const RefinerModel* refiner,
                                                  const Corpus& corpus, int iterations,
                                                  int threads);

}  // namespace srl
