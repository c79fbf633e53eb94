#include "srl/encoder.hpp"

#include <cmath>
#include <fstream>
#include <sstream>
#include <unordered_map>

#include "srl/common.hpp"

namespace srl {

void init_normal(Tensor& t, double stddev, Rng& rng) {
    for (auto& v : t.values()) v = static_cast<double>(rng.normal(0.0, stddev));
}

void init_xavier(Tensor& t, Rng& rng) {
    require(t.rank() == 2, "xavier init needs a rank-2 tensor, got ", t.shape_str());
    double a = std::sqrt(6.0 / (t.rows() + t.cols()));
    for (auto& v : t.values()) v = static_cast<double>((rng.uniform() * 2.0 - 1.0) * a);
}

// ---------------------------------------------------------------------------
// EmbeddingTables

namespace {

struct PretrainedVectors {
    int dim = 0;
    std::unordered_map<std::string, std::vector<double>> rows;
};

PretrainedVectors read_pretrained(const std::string& path) {
    std::ifstream in(path);
    require(in.good(), "cannot open embedding file: ", path);
    PretrainedVectors pre;
    std::string line;
    long line_no = 0;
    while (std::getline(in, line)) {
        ++line_no;
        if (!line.empty() && line.back() == '\r') line.pop_back();
        if (line.empty()) continue;
        std::istringstream ls(line);
        std::string token;
        ls >> token;
        std::vector<double> values;
        double v;
        while (ls >> v) values.push_back(v);
        if (pre.dim == 0) {
            if (values.empty())
                throw ParseError("embedding row carries no values", line_no);
            pre.dim = static_cast<int>(values.size());
        }
        if (static_cast<int>(values.size()) != pre.dim)
            throw ParseError(strcat_msg("embedding width ", values.size(),
                                        " differs from first row's ", pre.dim),
                             line_no);
        pre.rows[token] = std::move(values);
    }
    require(pre.dim > 0, "embedding file is empty: ", path);
    return pre;
}

}  // namespace

EmbeddingTables::EmbeddingTables(ParamStore& store, const Vocabulary& vocab,
                                 EmbeddingDims dims, std::string prefix, Rng& init_rng,
                                 const std::string& pretrained_path)
    : store_(&store), vocab_(&vocab), dims_(dims), prefix_(std::move(prefix)) {
    PretrainedVectors pre;
    if (!pretrained_path.empty()) {
        pre = read_pretrained(pretrained_path);
        dims_.d_w = pre.dim;
    }
    Param& words = store.create(prefix_ + ".word", {vocab.n_words(), dims_.d_w});
    init_normal(words.value, 0.01f, init_rng);
    if (!pretrained_path.empty()) {
        words.frozen_rows.assign(static_cast<std::size_t>(vocab.n_words()), 0);
        for (int i = 1; i < vocab.n_words(); ++i) {
            auto it = pre.rows.find(vocab.words()[static_cast<std::size_t>(i)]);
            if (it == pre.rows.end()) continue;
            for (int k = 0; k < dims_.d_w; ++k) words.value.at(i, k) = it->second[static_cast<std::size_t>(k)];
            words.frozen_rows[static_cast<std::size_t>(i)] = 1;
        }
    }
    Param& dep = store.create(prefix_ + ".dep", {vocab.n_dep(), dims_.d_dep});
    init_normal(dep.value, 0.01f, init_rng);
    Param& pos = store.create(prefix_ + ".pos", {vocab.n_pos(), dims_.d_pos});
    init_normal(pos.value, 0.01f, init_rng);
}

Var EmbeddingTables::embed(Graph& g, const Sentence& sent) const {
    std::vector<int> wids, dids, pids;
    wids.reserve(sent.tokens.size());
    for (const Token& t : sent.tokens) {
        wids.push_back(vocab_->word_id(t.form));
        dids.push_back(vocab_->dep_id(t.pdeprel));
        pids.push_back(vocab_->pos_id(t.ppos));
    }
    Var w = g.gather_rows(g.param(store_->get(prefix_ + ".word")), wids);
    Var d = g.gather_rows(g.param(store_->get(prefix_ + ".dep")), dids);
    Var p = g.gather_rows(g.param(store_->get(prefix_ + ".pos")), pids);
    return g.concat_cols({w, d, p});
}

// ---------------------------------------------------------------------------
// MLP extractors

void create_mlp(ParamStore& store, const std::string& name, int in, int out, Rng& rng) {
    Param& w = store.create(name + ".W", {out, in});
    init_xavier(w.value, rng);
    store.create(name + ".b", {out});
}

Var mlp_rows(Graph& g, ParamStore& store, const std::string& name, Var rows) {
    Var w = g.param(store.get(name + ".W"));
    Var b = g.param(store.get(name + ".b"));
    return g.elu(g.add_bias_rows(g.matmul(rows, g.transpose(w)), b));
}

Var mlp_vec(Graph& g, ParamStore& store, const std::string& name, Var v) {
    Var w = g.param(store.get(name + ".W"));
    Var b = g.param(store.get(name + ".b"));
    return g.elu(g.add(g.matvec(w, v), b));
}

// ---------------------------------------------------------------------------
// Highway BiLSTM

Encoder::Encoder(ParamStore& store, std::string prefix, int input, int hidden, int layers,
                 Rng& init_rng)
    : store_(&store), prefix_(std::move(prefix)), input_(input), hidden_(hidden),
      layers_(layers) {
    require(input >= 1 && hidden >= 1 && layers >= 1, "bad encoder dims: input ", input,
            " hidden ", hidden, " layers ", layers);
    for (int k = 0; k < layers_; ++k) {
        int in = k == 0 ? input_ : 2 * hidden_;
        std::string lp = prefix_ + ".l" + std::to_string(k);
        for (const char* dir : {".fwd", ".bwd"}) {
            Param& w = store.create(lp + dir + ".W", {4 * hidden_, in + hidden_});
            init_xavier(w.value, init_rng);
            Param& b = store.create(lp + dir + ".b", {4 * hidden_});
            for (int i = hidden_; i < 2 * hidden_; ++i) b.value.at(i) = 1.0f;  // forget gate
        }
        Param& gate_w = store.create(lp + ".hw.gate.W", {2 * hidden_, in});
        init_xavier(gate_w.value, init_rng);
        store.create(lp + ".hw.gate.b", {2 * hidden_});
        if (in != 2 * hidden_) {
            Param& proj_w = store.create(lp + ".hw.proj.W", {2 * hidden_, in});
            init_xavier(proj_w.value, init_rng);
        }
    }
}

Var Encoder::run_direction(Graph& g, Var rows, const std::string& dir_prefix, bool reverse,
                           bool train, double p_rec, Rng& rng) const {
    int n = g.value(rows).rows();
    int hid = hidden_;
    Var w = g.param(store_->get(dir_prefix + ".W"));
    Var b = g.param(store_->get(dir_prefix + ".b"));
    Var h = g.constant(Tensor::zeros({hid}));
    Var c = h;
    Var rec_mask = -1;
    if (train && p_rec > 0.0f) rec_mask = g.constant(dropout_mask({hid}, p_rec, rng));
    std::vector<Var> hs(static_cast<std::size_t>(n));
    for (int step = 0; step < n; ++step) {
        int t = reverse ? n - 1 - step : step;
        Var x_t = g.row(rows, t);
        Var h_in = rec_mask >= 0 ? g.mul(h, rec_mask) : h;
        Var gates = g.add(g.matvec(w, g.concat_vec({x_t, h_in})), b);
        Var gi = g.sigmoid(g.slice_vec(gates, 0, hid));
        Var gf = g.sigmoid(g.slice_vec(gates, hid, 2 * hid));
        Var go = g.sigmoid(g.slice_vec(gates, 2 * hid, 3 * hid));
        Var gc = g.tanh_op(g.slice_vec(gates, 3 * hid, 4 * hid));
        c = g.add(g.mul(gf, c), g.mul(gi, gc));
        h = g.mul(go, g.tanh_op(c));
        hs[static_cast<std::size_t>(t)] = h;
    }
    return g.stack_rows(hs);
}

Var Encoder::apply(Graph& g, Var rows, bool train, double p_in, double p_rec, Rng& rng) const {
    require(g.value(rows).rank() == 2 && g.value(rows).cols() == input_,
            "encoder expects n x ", input_, " input, got ", g.value(rows).shape_str());
    int n = g.value(rows).rows();
    Var x = rows;
    for (int k = 0; k < layers_; ++k) {
        int in = k == 0 ? input_ : 2 * hidden_;
        std::string lp = prefix_ + ".l" + std::to_string(k);
        Var x_in = x;
        if (train && p_in > 0.0f) {
            Var mask = g.constant(dropout_mask({in}, p_in, rng));
            x_in = g.mul(x, g.repeat_rows(mask, n));
        }
        Var fwd = run_direction(g, x_in, lp + ".fwd", false, train, p_rec, rng);
        Var bwd = run_direction(g, x_in, lp + ".bwd", true, train, p_rec, rng);
        Var hcat = g.concat_cols({fwd, bwd});
        Var gate = g.sigmoid(g.add_bias_rows(
            g.matmul(x_in, g.transpose(g.param(store_->get(lp + ".hw.gate.W")))),
            g.param(store_->get(lp + ".hw.gate.b"))));
        Var carry = in == 2 * hidden_
                        ? x_in
                        : g.matmul(x_in, g.transpose(g.param(store_->get(lp + ".hw.proj.W"))));
        x = g.add(g.mul(gate, hcat), g.mul(g.one_minus(gate), carry));
    }
    return x;
}

}  // namespace srl
