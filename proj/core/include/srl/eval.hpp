#pragma once

#include <string>
#include <vector>

#include "srl/conll.hpp"

namespace srl {

// Labeled precision/recall/F1 with sense items included, plus the role-only
// and sense-only decomposition. Items per instance: one (predicate, sense)
// pair and one (position, label) pair per non-null role. The empty corpus
// scores 1 across the board.
struct EvalReport {
    double precision = 1.0, recall = 1.0, f1 = 1.0;
    double role_precision = 1.0, role_recall = 1.0, role_f1 = 1.0;
    double sense_accuracy = 1.0;
    long correct = 0, predicted = 0, gold = 0;
    long role_correct = 0, role_predicted = 0, role_gold = 0;
    long sense_correct = 0, instances = 0;
};

struct ViolationCounts {
    long unique = 0;        // core role (A0-A5, AA) on two or more tokens
    long continuation = 0;  // C-X with no X on a strictly earlier token
    long reference = 0;     // R-X with no X anywhere in the instance
};

// Token-level (gold, predicted) counts restricted to a label subset, and the
// cells of those counts a second prediction repaired (first wrong, second
// right). correction[g][p] <= confusion[g][p] off the diagonal.
struct ConfusionMatrices {
    std::vector<std::string> labels;
    std::vector<std::vector<long>> confusion;   // [gold][first]
    std::vector<std::vector<long>> correction;  // [gold][first]
};

EvalReport evaluate_predictions(const std::vector<PredicateInstance>& gold,
                                const std::vector<InstancePrediction>& predicted);

ViolationCounts instance_violations(const std::vector<std::string>& roles);
ViolationCounts constraint_violations(const std::vector<InstancePrediction>& predicted);

ConfusionMatrices confusion_and_correction(const std::vector<PredicateInstance>& gold,
                                           const std::vector<InstancePrediction>& first,
                                           const std::vector<InstancePrediction>& second,
                                           const std::vector<std::string>& labels);

// Treat a parsed gold-format corpus's instances as predictions (their PRED
// sense and APRED role columns), for file-vs-file scoring.
std::vector<InstancePrediction> instances_as_predictions(
    const std::vector<PredicateInstance>& instances);

// Rejects corpora whose sentence shapes or predicate positions differ.
void require_aligned(const std::vector<PredicateInstance>& gold,
                     const std::vector<PredicateInstance>& predicted);

std::string report_text(const EvalReport& report);
std::string report_json(const EvalReport& report);  // one JSON object per line
std::string violations_text(const ViolationCounts& v);
std::string violations_json(const ViolationCounts& v);
std::string matrices_text(const ConfusionMatrices& m);
std::string matrix_csv(const std::vector<std::string>& labels,
                       const std::vector<std::vector<long>>& cells);

}  // namespace srl
