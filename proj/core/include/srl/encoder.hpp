#pragma once

#include <string>

#include "srl/conll.hpp"
#include "srl/graph.hpp"
#include "srl/vocab.hpp"

namespace srl {

void init_normal(Tensor& t, double stddev, Rng& rng);
void init_xavier(Tensor& t, Rng& rng);  // rank-2; uniform(+-sqrt(6/(fan_in+fan_out)))

struct EmbeddingDims {
    int d_w = 300;
    int d_dep = 64;
    int d_pos = 64;
    int width() const { return d_w + d_dep + d_pos; }
};

// Word, dependency-label and POS lookup tables. Rows found in a pretrained
// vector file are frozen; everything else trains. Token rows are produced
// from the PREDICTED columns (form / PDEPREL / PPOS).
class EmbeddingTables {
public:
    EmbeddingTables(ParamStore& store, const Vocabulary& vocab, EmbeddingDims dims,
                    std::string prefix, Rng& init_rng,
                    const std::string& pretrained_path = "");

    const EmbeddingDims& dims() const { return dims_; }
    int width() const { return dims_.width(); }
    // n x width matrix of concatenated (word, dep, pos) rows.
    Var embed(Graph& g, const Sentence& sent) const;

private:
    ParamStore* store_;
    const Vocabulary* vocab_;
    EmbeddingDims dims_;
    std::string prefix_;
};

// One-layer feature extractor with exponential-linear activation:
// out = ELU(W * in + b). Parameters live under "<name>.W" / "<name>.b".
void create_mlp(ParamStore& store, const std::string& name, int in, int out, Rng& rng);
Var mlp_rows(Graph& g, ParamStore& store, const std::string& name, Var rows);
Var mlp_vec(Graph& g, ParamStore& store, const std::string& name, Var v);

// Stacked bidirectional LSTM with per-layer highway connections:
// out = gate (*) lstm_out + (1 - gate) (*) proj(in). Recurrent dropout is
// variational: one mask per sequence per layer per direction, applied to
// the recurrent state; input dropout likewise uses one mask per layer.
class Encoder {
public:
    Encoder(ParamStore& store, std::string prefix, int input, int hidden, int layers,
            Rng& init_rng);

    int output_width() const { return 2 * hidden_; }
    Var apply(Graph& g, Var rows, bool train, double p_in, double p_rec, Rng& rng) const;

private:
    ParamStore* store_;
    std::string prefix_;
    int input_;
    int hidden_;
    int layers_;

    Var run_direction(Graph& g, Var rows, const std::string& dir_prefix, bool reverse,
                      bool train, double p_rec, Rng& rng) const;
};

}  // namespace srl
