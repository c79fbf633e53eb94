#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "srl/conll.hpp"

namespace srl {

// Template grammar with a controllable argument interaction. Every sentence
// holds one predicate; an ambiguous slot token (dep OBL) whose local features
// never vary takes gold role A0 when no subject (dep SBJ, POS NN -> A0) is
// present and A1 otherwise, with probability q; otherwise its role is drawn
// independently. A distractor token shares the subject's dep label but not
// its POS and is never an argument. Word forms are globally unique, so held-
// out text reduces to (unknown word, POS, dep) inputs. Sense .02 appears
// exactly when an A2 argument (dep DIR) is realized, for two-sense lemmas.
// Filler runs on both sides of the predicate keep the subject, the slot and
// the A2 token many positions apart, so resolving the interaction from
// surface features alone requires carrying a bit across a long stretch of
// held-out (all-unknown-word) context rather than reading a neighbor.
struct GrammarConfig {
    std::uint64_t seed = 7;
    int sentences = 200;
    double q = 1.0f;                 // interaction strength
    double slot_freq = 1.0f;         // ambiguous slot presence
    double subject_freq = 0.35f;     // subject (A0) presence
    double distractor_freq = 0.5f;   // fake-subject presence
    double dir_freq = 0.4f;          // A2 argument presence
    double adv_freq = 0.3f;          // AM argument presence
    int lemmas = 8;                 // predicate lemma count
    int two_sense = 6;              // how many lemmas have 2 senses
    int min_filler = 3;             // fewest filler tokens on each side
    int max_filler = 8;             // most filler tokens on each side
};

Corpus generate_corpus(const GrammarConfig& config);

// Deterministic contiguous splits after a seeded shuffle.
std::vector<Corpus> split_corpus(const Corpus& corpus, const std::vector<double>& fractions,
                                 std::uint64_t seed);
std::vector<Corpus> split_corpus_counts(const Corpus& corpus, const std::vector<int>& counts,
                                        std::uint64_t seed);

std::string synth_manifest(const GrammarConfig& config);

// Accuracy over eval tokens with the given dep label, for the best per-token
// predictor that sees only (POS, dep) — conditional argmax frequencies
// counted on the training corpus. This is the ceiling any per-token scorer
// of local features can reach on the ambiguous slot.
double local_feature_ceiling(const Corpus& train, const Corpus& eval,
                             const std::string& slot_dep);

// Accuracy of the interaction rule itself (A0 iff no other gold A0) over the
// same tokens; 1.0 at q = 1 by construction.
double interaction_oracle_accuracy(const Corpus& eval, const std::string& slot_dep);

// Accuracy of model predictions restricted to tokens with the given dep label.
double slot_accuracy(const Corpus& corpus, const std::vector<PredicateInstance>& gold,
                     const std::vector<InstancePrediction>& predicted,
                     const std::string& slot_dep);

}  // namespace srl
