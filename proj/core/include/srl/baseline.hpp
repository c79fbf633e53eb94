#pragma once

#include <string>
#include <vector>

#include "srl/encoder.hpp"
#include "srl/graph.hpp"
#include "srl/vocab.hpp"

namespace srl {

struct BaselineConfig {
    EmbeddingDims emb;
    int d_h = 428;
    int layers = 3;
    int d_rho0 = 300;
    int d_rho1 = 128;
    int d_pi = 128;
    double dropout = 0.3f;
    double rdropout = 0.3f;
    std::string pretrained;
};

// Factorized model: role logits from two biaffine scorers (null vs. other
// roles) over MLP features of a highway-BiLSTM encoding, sense logits from
// a predicate-specific sense embedding matrix. Also the producer of the
// frozen logits the refiner starts from.
class BaselineModel {
public:
    BaselineModel(ParamStore& store, const Vocabulary& vocab, BaselineConfig cfg,
                  Rng& init_rng);

    struct Encoded {
        Var x = -1;  // n x d_x embedded sentence
        Var h = -1;  // n x 2*d_h encoding (feature dropout applied in train mode)
    };

    struct Outputs {
        Var x = -1;        // n x d_x embedded sentence
        Var h = -1;        // n x 2*d_h encoding
        Var i_alpha = -1;  // n x r role logits (column 0 = null)
        Var i_pi = -1;     // m sense logits
        std::vector<std::string> inventory;
    };

    // Split entry points so several predicates of one sentence can share an
    // encoder pass within one graph.
    Encoded encode(Graph& g, const Sentence& sent, bool train, Rng& rng) const;
    Outputs score(Graph& g, const Encoded& enc, int j, const std::string& plemma) const;
    Outputs run(Graph& g, const Sentence& sent, int j, const std::string& plemma, bool train,
                Rng& rng) const;

    // mean-over-tokens role margin loss + sense margin loss
    Var loss(Graph& g, const Outputs& out, const PredicateInstance& inst) const;

    std::vector<int> gold_role_ids(const PredicateInstance& inst) const;

    const Vocabulary& vocab() const { return *vocab_; }
    const BaselineConfig& config() const { return cfg_; }
    ParamStore& params() { return *store_; }
    const ParamStore& params() const { return *store_; }
    int input_width() const { return emb_.width(); }

private:
    ParamStore* store_;
    const Vocabulary* vocab_;
    BaselineConfig cfg_;
    EmbeddingTables emb_;
    Encoder enc_;

    Var biaffine_null(Graph& g, Var pred_feat, Var arg_feats) const;
    Var biaffine_other(Graph& g, Var pred_feat, Var arg_feats) const;
};

// Argmax readout; ties break toward the lowest index.
InstancePrediction decode_prediction(const Tensor& role_probs, const Tensor& sense_probs,
                                     const Vocabulary& vocab,
                                     const std::vector<std::string>& inventory);

}  // namespace srl
