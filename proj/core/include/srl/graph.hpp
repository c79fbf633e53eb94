#pragma once

#include <functional>
#include <memory>
#include <string>
#include <vector>

#include "srl/rng.hpp"
#include "srl/tensor.hpp"

namespace srl {

// Named trainable leaf. `grad` accumulates across graphs until the
// optimizer consumes it. Rows listed in `frozen_rows` never receive
// updates (used for pretrained embedding rows).
struct Param {
    std::string name;
    Tensor value;
    Tensor grad;
    std::vector<std::uint8_t> frozen_rows;  // empty = all rows trainable
};

class ParamStore {
public:
    Param& create(const std::string& name, std::vector<int> shape);
    Param& get(const std::string& name);
    const Param& get(const std::string& name) const;
    bool has(const std::string& name) const;
    std::size_t count() const { return params_.size(); }
    Param& at(std::size_t i) { return *params_[i]; }
    const Param& at(std::size_t i) const { return *params_[i]; }

    void zero_grads();
    // Deep copy of all values, in store order (for best-checkpoint snapshots).
    std::vector<Tensor> snapshot_values() const;
    void restore_values(const std::vector<Tensor>& values);

private:
    std::vector<std::unique_ptr<Param>> params_;
    std::vector<std::pair<std::string, std::size_t>> index_;  // kept sorted
    std::size_t find(const std::string& name) const;          // npos if absent
};

// Reverse-mode tape. Nodes are appended in execution order, which is a
// valid topological order; backward() walks them exactly once in reverse.
// A graph is built and consumed by one thread.
class Graph {
public:
    using Var = int;

    Graph() = default;
    Graph(const Graph&) = delete;
    Graph& operator=(const Graph&) = delete;

    const Tensor& value(Var v) const { return nodes_[static_cast<std::size_t>(v)].value; }
    const Tensor& grad(Var v) const { return nodes_[static_cast<std::size_t>(v)].grad; }
    std::size_t node_count() const { return nodes_.size(); }

    // Leaves.
    Var constant(Tensor t);
    Var param(Param& p);

    // Elementwise and scalar ops.
    Var add(Var a, Var b);
    Var sub(Var a, Var b);
    Var mul(Var a, Var b);
    Var scale(Var a, double c);
    Var one_minus(Var a);
    Var sigmoid(Var a);
    Var tanh_op(Var a);
    Var elu(Var a);

    // Linear algebra.
    Var matmul(Var a, Var b);        // (p,q)x(q,s) -> (p,s)
    Var matvec(Var a, Var v);        // (p,q)x(q)   -> (p)
    Var vecmat(Var v, Var a);        // (p)x(p,q)   -> (q)
    Var dot(Var u, Var v);           // (k)x(k)     -> scalar
    Var transpose(Var a);

    // Shape plumbing.
    Var concat_vec(const std::vector<Var>& parts);
    Var concat_cols(const std::vector<Var>& parts);
    Var stack_rows(const std::vector<Var>& rows);
    Var stack_cols(const std::vector<Var>& cols);
    Var slice_vec(Var v, int begin, int end);
    Var slice_rows(Var a, int begin, int end);
    Var slice_cols(Var a, int begin, int end);
    Var row(Var a, int i);
    Var pick(Var v, int i);
    Var repeat_rows(Var v, int n);
    Var gather_rows(Var table, std::vector<int> ids);
    Var add_bias_rows(Var a, Var bias);
    Var add_vec_scalar(Var v, Var s);

    // Reductions.
    Var sum(Var a);
    Var mean_vec(Var v);
    Var col_sum(Var a);

    // Probability ops.
    Var softmax_rows(Var a);
    Var softmax_vec(Var v);

    // Per-token aggregate of every *other* token's non-null role mass:
    // out[i][u] = sum_{k != i} R[k][u+1] for an (n,r) row-stochastic input.
    Var other_role_aggregate(Var r_matrix);

    // Cost-augmented cross entropy: subtract `margin` from the gold logit,
    // then apply cross entropy. margin = 0 gives plain cross entropy.
    Var margin_ce_rows(Var logits, std::vector<int> gold, double margin = 1.0f);
    Var margin_ce_vec(Var logits, int gold, double margin = 1.0f);

    // Inverted dropout; identity when !train or p == 0.
    Var dropout(Var a, double p, Rng& rng, bool train);

    // Accumulates d(loss)/d(param) into every bound Param's grad slot.
    void backward(Var loss);

private:
    struct Node {
        Tensor value;
        Tensor grad;
        std::function<void(Graph&, Node&)> back;  // null for leaves
        Param* bound = nullptr;                   // set for param leaves
    };

    std::vector<Node> nodes_;

    Var emit(Tensor value, std::function<void(Graph&, Node&)> back);
    Node& node(Var v) { return nodes_[static_cast<std::size_t>(v)]; }
};

using Var = Graph::Var;

// Tensor-level helpers shared by graph ops and noise injection.
Tensor softmax_rows_value(const Tensor& logits);
Tensor softmax_vec_value(const Tensor& logits);

// logits + lambda * eps with eps drawn i.i.d. from the standard Gumbel
// distribution. lambda = 0 skips the draw entirely and returns the logits
// unchanged, bit for bit.
Tensor gumbel_perturb(const Tensor& logits, double lambda, Rng& rng);

// softmax(gumbel_perturb(logits, lambda)); at lambda = 0 this is the plain
// softmax, bit for bit.
Tensor gumbel_softmax_vec(const Tensor& logits, double lambda, Rng& rng);
Tensor gumbel_softmax_rows(const Tensor& logits, double lambda, Rng& rng);

// Per-row / per-instance inverted dropout mask: entries are
// 1/(1-p) with probability 1-p, else 0. Used for variational recurrent
// dropout where the same mask must be reused across time steps.
Tensor dropout_mask(std::vector<int> shape, double p, Rng& rng);

}  // namespace srl
