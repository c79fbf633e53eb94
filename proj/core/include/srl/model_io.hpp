#pragma once

#include <string>

#include "srl/baseline.hpp"
#include "srl/refiner.hpp"

namespace srl {

// Checkpoint files carry the model configuration and hashes linking them to
// their vocabulary (and, for refiners, to the exact baseline checkpoint
// bytes). Loading reconstructs the parameter set and restores every tensor
// bit for bit; mismatched hashes are refused.

void save_baseline(const std::string& path, const ParamStore& store, const Vocabulary& vocab,
                   const BaselineConfig& cfg);
BaselineModel load_baseline(const std::string& path, ParamStore& store,
                            const Vocabulary& vocab);

void save_refiner(const std::string& path, const ParamStore& store, const RefinerConfig& cfg,
                  int input_width, int n_roles, const std::string& baseline_hash_hex,
                  const std::string& vocab_hash_hex);

struct LoadedRefiner {
    RefinerModel model;
    std::string baseline_hash_hex;
    std::string vocab_hash_hex;
};
LoadedRefiner load_refiner(const std::string& path, ParamStore& store);

}  // namespace srl
