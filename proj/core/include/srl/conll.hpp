#pragma once

#include <iosfwd>
#include <string>
#include <vector>

namespace srl {

// One CoNLL-2009 row. Columns: ID FORM LEMMA PLEMMA POS PPOS FEAT PFEAT
// HEAD PHEAD DEPREL PDEPREL FILLPRED PRED APRED1..APREDk. Empty cells are
// kept as "_".
struct Token {
    int id = 0;  // 1-based
    std::string form, lemma, plemma, pos, ppos, feat, pfeat;
    int head = 0, phead = 0;  // 0 = root
    std::string deprel, pdeprel;
    bool fillpred = false;
    std::string pred = "_";
    std::vector<std::string> apreds;  // one per predicate in the sentence
};

struct Sentence {
    std::vector<Token> tokens;
    int size() const { return static_cast<int>(tokens.size()); }
    std::vector<int> predicate_positions() const;  // 1-based, in order
};

using Corpus = std::vector<Sentence>;

// One (sentence, predicate) pair: the atomic unit of prediction.
struct PredicateInstance {
    int sentence_index = 0;
    int j = 0;           // 1-based predicate position
    int pred_index = 0;  // 0-based position among the sentence's predicates
    std::string gold_sense;
    std::vector<std::string> gold_roles;  // per token, "_" = not an argument
};

struct InstancePrediction {
    std::string sense;
    std::vector<std::string> roles;  // per token, "_" = not an argument
};

Corpus parse_corpus(std::istream& in);
Corpus parse_corpus_text(const std::string& text);
Corpus parse_corpus_file(const std::string& path);

std::string write_corpus(const Corpus& corpus);
void write_corpus_file(const Corpus& corpus, const std::string& path);

std::vector<PredicateInstance> extract_instances(const Corpus& corpus);

// Replaces PRED and argument columns with predictions (aligned with
// extract_instances order) and renders the result.
std::string write_predictions(const Corpus& corpus,
                              const std::vector<InstancePrediction>& predictions);

}  // namespace srl
