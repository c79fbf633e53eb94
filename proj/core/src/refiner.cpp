#include "srl/refiner.hpp"

#include "srl/common.hpp"

namespace srl {

RefinerModel::RefinerModel(ParamStore& store, int input_width, int n_roles, RefinerConfig cfg,
                           Rng& init_rng)
    : store_(&store), input_width_(input_width), n_roles_(n_roles), cfg_(cfg),
      enc_(store, "refiner.enc", input_width, cfg.d_h, cfg.layers, init_rng) {
    require(n_roles >= 2, "refiner needs the null role plus at least one role, got ", n_roles);
    int wide = 2 * cfg_.d_h;
    create_mlp(store, "refiner.mlp_galpha", wide, cfg_.d_g, init_rng);
    create_mlp(store, "refiner.mlp_gpi", wide, cfg_.d_g, init_rng);
    store.create("refiner.Walpha", {cfg_.d_r, role_input_width()});
    store.create("refiner.Wpi", {cfg_.d_r, sense_input_width()});
    if (!cfg_.tied) {
        store.create("refiner.Walpha_out", {n_roles_, cfg_.d_r});
        store.create("refiner.Wpi_core", {cfg_.d_pi, cfg_.d_r});
    }
}

int RefinerModel::role_input_width() const {
    int r = n_roles_;
    int base = r + 2 * cfg_.d_g + cfg_.d_pi;
    return cfg_.structured ? base + (r - 1) : base;
}

int RefinerModel::sense_input_width() const {
    int base = cfg_.d_pi + cfg_.d_g;
    return cfg_.structured ? base + (n_roles_ - 1) : base;
}

Var RefinerModel::encode_features(Graph& g, Var x, bool train, Rng& rng) const {
    Var enc = enc_.apply(g, x, train, cfg_.dropout, cfg_.rdropout, rng);
    return g.dropout(enc, cfg_.dropout, rng, train);
}

std::vector<RefinerModel::Step> RefinerModel::iterate_from(Graph& g, Var feats, Var i_alpha,
                                                           Var i_pi, Var pi_matrix, Var r0,
                                                           Var p0, int j,
                                                           int iterations) const {
    int n = g.value(feats).rows();
    int r = n_roles_;
    require(1 <= j && j <= n, "predicate position ", j, " outside sentence of ", n, " tokens");
    require(g.value(i_alpha).rows() == n && g.value(i_alpha).cols() == r,
            "role logits shaped ", g.value(i_alpha).shape_str(), ", expected ",
            shape_str({n, r}));
    require(g.value(pi_matrix).cols() == cfg_.d_pi, "sense embedding width ",
            g.value(pi_matrix).cols(), " does not match corrector width ", cfg_.d_pi);
    require(static_cast<int>(g.value(i_pi).size()) == g.value(pi_matrix).rows(),
            "sense logit count ", g.value(i_pi).size(), " does not match inventory of ",
            g.value(pi_matrix).rows());
    require(iterations >= 0, "negative iteration count ", iterations);

    Var g_alpha = mlp_rows(g, *store_, "refiner.mlp_galpha", feats);
    Var g_pi = mlp_vec(g, *store_, "refiner.mlp_gpi", g.row(feats, j - 1));
    Var g_pi_rows = g.repeat_rows(g_pi, n);

    Var w_alpha = g.param(store_->get("refiner.Walpha"));
    Var w_pi = g.param(store_->get("refiner.Wpi"));

    std::vector<Step> steps;
    steps.push_back({i_alpha, i_pi, r0, p0});
    for (int t = 1; t <= iterations; ++t) {
        const Step prev = steps.back();
        Var relaxed_sense = g.vecmat(prev.P, pi_matrix);  // d_pi

        std::vector<Var> z_alpha_parts;
        z_alpha_parts.push_back(prev.R);
        if (cfg_.structured) z_alpha_parts.push_back(g.other_role_aggregate(prev.R));
        z_alpha_parts.push_back(g_alpha);
        z_alpha_parts.push_back(g_pi_rows);
        z_alpha_parts.push_back(g.repeat_rows(relaxed_sense, n));
        Var z_alpha = g.concat_cols(z_alpha_parts);
        Var hidden_rows = g.sigmoid(g.matmul(z_alpha, g.transpose(w_alpha)));
        Var m_alpha =
            cfg_.tied
                ? g.matmul(hidden_rows, g.slice_cols(w_alpha, 0, r))
                : g.matmul(hidden_rows, g.transpose(g.param(store_->get("refiner.Walpha_out"))));
        Var role_logits = g.add(m_alpha, i_alpha);

        std::vector<Var> z_pi_parts;
        z_pi_parts.push_back(relaxed_sense);
        if (cfg_.structured) z_pi_parts.push_back(g.col_sum(g.slice_cols(prev.R, 1, r)));
        z_pi_parts.push_back(g_pi);
        Var z_pi = g.concat_vec(z_pi_parts);
        Var hidden_vec = g.sigmoid(g.matvec(w_pi, z_pi));
        Var core = cfg_.tied
                       ? g.vecmat(hidden_vec, g.slice_cols(w_pi, 0, cfg_.d_pi))
                       : g.matvec(g.param(store_->get("refiner.Wpi_core")), hidden_vec);
        Var sense_logits = g.add(i_pi, g.matvec(pi_matrix, core));

        steps.push_back(
            {role_logits, sense_logits, g.softmax_rows(role_logits), g.softmax_vec(sense_logits)});
    }
    return steps;
}

std::vector<RefinerModel::Step> RefinerModel::iterate(Graph& g, Var x, Var i_alpha, Var i_pi,
                                                      Var pi_matrix, Var r0, Var p0, int j,
                                                      int iterations, bool train,
                                                      Rng& rng) const {
    return iterate_from(g, encode_features(g, x, train, rng), i_alpha, i_pi, pi_matrix, r0, p0,
                        j, iterations);
}

}  // namespace srl
