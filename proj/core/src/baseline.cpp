#include "srl/baseline.hpp"

#include "srl/common.hpp"

namespace srl {

BaselineModel::BaselineModel(ParamStore& store, const Vocabulary& vocab, BaselineConfig cfg,
                             Rng& init_rng)
    : store_(&store), vocab_(&vocab), cfg_(cfg),
      emb_(store, vocab, cfg.emb, "baseline.emb", init_rng, cfg.pretrained),
      enc_(store, "baseline.enc", emb_.width(), cfg.d_h, cfg.layers, init_rng) {
    cfg_.emb = emb_.dims();  // pretrained vectors may override d_w
    int wide = 2 * cfg_.d_h;
    create_mlp(store, "baseline.mlp_rho0", wide, cfg_.d_rho0, init_rng);
    create_mlp(store, "baseline.mlp_rho1", wide, cfg_.d_rho1, init_rng);
    create_mlp(store, "baseline.mlp_vrho0", wide, cfg_.d_rho0, init_rng);
    create_mlp(store, "baseline.mlp_vrho1", wide, cfg_.d_rho1, init_rng);
    create_mlp(store, "baseline.mlp_pi", wide, cfg_.d_pi, init_rng);

    int r = vocab.n_roles();
    require(r >= 2, "role vocabulary needs the null role plus at least one role, got ", r);
    Param& u0 = store.create("baseline.bi_null.U", {cfg_.d_rho0, cfg_.d_rho0});
    init_xavier(u0.value, init_rng);
    store.create("baseline.bi_null.w", {2 * cfg_.d_rho0});
    store.create("baseline.bi_null.b", {1});
    // Other-roles bilinear blocks, stacked vertically: rows [u*d, (u+1)*d)
    // hold the transposed block for role u+1.
    Param& u1 = store.create("baseline.bi_other.U", {(r - 1) * cfg_.d_rho1, cfg_.d_rho1});
    init_xavier(u1.value, init_rng);
    Param& w1 = store.create("baseline.bi_other.w", {r - 1, 2 * cfg_.d_rho1});
    init_xavier(w1.value, init_rng);
    store.create("baseline.bi_other.b", {r - 1});

    for (const auto& [lemma, inventory] : vocab.sense_table()) {
        Param& pi = store.create("sense." + lemma,
                                 {static_cast<int>(inventory.size()), cfg_.d_pi});
        init_normal(pi.value, 0.01f, init_rng);
    }
}

Var BaselineModel::biaffine_null(Graph& g, Var pred_feat, Var arg_feats) const {
    int n = g.value(arg_feats).rows();
    Var u = g.param(store_->get("baseline.bi_null.U"));
    Var w = g.param(store_->get("baseline.bi_null.w"));
    Var b = g.param(store_->get("baseline.bi_null.b"));
    Var bilinear = g.matvec(arg_feats, g.vecmat(pred_feat, u));
    Var both = g.concat_cols({g.repeat_rows(pred_feat, n), arg_feats});
    Var linear = g.matvec(both, w);
    return g.add_vec_scalar(g.add(bilinear, linear), b);
}

Var BaselineModel::biaffine_other(Graph& g, Var pred_feat, Var arg_feats) const {
    int n = g.value(arg_feats).rows();
    int d = cfg_.d_rho1;
    int r = vocab_->n_roles();
    Var u = g.param(store_->get("baseline.bi_other.U"));
    Var w = g.param(store_->get("baseline.bi_other.w"));
    Var b = g.param(store_->get("baseline.bi_other.b"));
    Var qcat = g.matvec(u, pred_feat);  // (r-1)*d
    std::vector<Var> blocks;
    for (int k = 0; k + 1 < r; ++k) blocks.push_back(g.slice_vec(qcat, k * d, (k + 1) * d));
    Var q = g.stack_rows(blocks);  // (r-1) x d
    Var bilinear = g.matmul(arg_feats, g.transpose(q));
    Var both = g.concat_cols({g.repeat_rows(pred_feat, n), arg_feats});
    Var linear = g.matmul(both, g.transpose(w));
    return g.add_bias_rows(g.add(bilinear, linear), b);
}

BaselineModel::Encoded BaselineModel::encode(Graph& g, const Sentence& sent, bool train,
                                             Rng& rng) const {
    Encoded enc;
    enc.x = emb_.embed(g, sent);
    Var h = enc_.apply(g, enc.x, train, cfg_.dropout, cfg_.rdropout, rng);
    enc.h = g.dropout(h, cfg_.dropout, rng, train);
    return enc;
}

BaselineModel::Outputs BaselineModel::score(Graph& g, const Encoded& enc, int j,
                                            const std::string& plemma) const {
    int n = g.value(enc.h).rows();
    require(1 <= j && j <= n, "predicate position ", j, " outside sentence of ", n, " tokens");
    Outputs out;
    out.x = enc.x;
    out.h = enc.h;
    Var h = enc.h;

    Var arg_null = mlp_rows(g, *store_, "baseline.mlp_rho0", h);
    Var arg_other = mlp_rows(g, *store_, "baseline.mlp_rho1", h);
    Var h_j = g.row(h, j - 1);
    Var pred_null = mlp_vec(g, *store_, "baseline.mlp_vrho0", h_j);
    Var pred_other = mlp_vec(g, *store_, "baseline.mlp_vrho1", h_j);

    Var i_rho0 = biaffine_null(g, pred_null, arg_null);
    Var i_rho1 = biaffine_other(g, pred_other, arg_other);
    out.i_alpha = g.concat_cols({g.stack_cols({i_rho0}), i_rho1});

    out.inventory = vocab_->sense_inventory(plemma);
    if (vocab_->has_lemma(plemma)) {
        Var h_pi = mlp_vec(g, *store_, "baseline.mlp_pi", h_j);
        out.i_pi = g.matvec(g.param(store_->get("sense." + plemma)), h_pi);
    } else {
        out.i_pi = g.constant(Tensor::zeros({1}));
    }
    return out;
}

BaselineModel::Outputs BaselineModel::run(Graph& g, const Sentence& sent, int j,
                                          const std::string& plemma, bool train,
                                          Rng& rng) const {
    return score(g, encode(g, sent, train, rng), j, plemma);
}

std::vector<int> BaselineModel::gold_role_ids(const PredicateInstance& inst) const {
    std::vector<int> ids;
    ids.reserve(inst.gold_roles.size());
    for (const std::string& label : inst.gold_roles) {
        int id = vocab_->role_id(label);
        ids.push_back(id < 0 ? 0 : id);  // labels unseen in training score as null
    }
    return ids;
}

Var BaselineModel::loss(Graph& g, const Outputs& out, const PredicateInstance& inst) const {
    Var role_loss = g.mean_vec(g.margin_ce_rows(out.i_alpha, gold_role_ids(inst), 1.0f));
    int sense_idx = -1;
    for (std::size_t k = 0; k < out.inventory.size(); ++k) {
        if (out.inventory[k] == inst.gold_sense) {
            sense_idx = static_cast<int>(k);
            break;
        }
    }
    if (sense_idx < 0) return role_loss;  // sense outside the inventory carries no signal
    return g.add(role_loss, g.margin_ce_vec(out.i_pi, sense_idx, 1.0f));
}

InstancePrediction decode_prediction(const Tensor& role_probs, const Tensor& sense_probs,
                                     const Vocabulary& vocab,
                                     const std::vector<std::string>& inventory) {
    InstancePrediction pred;
    int n = role_probs.rows();
    pred.roles.reserve(static_cast<std::size_t>(n));
    for (int i = 0; i < n; ++i) pred.roles.push_back(vocab.role_label(argmax_row(role_probs, i)));
    require(!inventory.empty(), "empty sense inventory at decode time");
    require(static_cast<int>(inventory.size()) == static_cast<int>(sense_probs.size()),
            "sense distribution size ", sense_probs.size(), " does not match inventory of ",
            inventory.size());
    pred.sense = inventory[static_cast<std::size_t>(argmax(sense_probs))];
    return pred;
}

}  // namespace srl
