#include <benchmark/benchmark.h>

#include <optional>

#include "srl/baseline.hpp"
#include "srl/conll.hpp"
#include "srl/refiner.hpp"
#include "srl/rng.hpp"
#include "srl/synth.hpp"

using namespace srl;

namespace {

Tensor random_tensor(std::vector<int> shape, Rng& rng) {
    Tensor t(std::move(shape));
    for (auto& x : t.values()) x = static_cast<double>(rng.normal(0, 0.5));
    return t;
}

void bm_matmul_forward(benchmark::State& state) {
    int n = static_cast<int>(state.range(0));
    Rng rng(1);
    Tensor a = random_tensor({n, n}, rng);
    Tensor b = random_tensor({n, n}, rng);
    for (auto _ : state) {
        Graph g;
        Var out = g.matmul(g.constant(a), g.constant(b));
        benchmark::DoNotOptimize(g.value(out).at(0, 0));
    }
}
BENCHMARK(bm_matmul_forward)->Arg(32)->Arg(128);

void bm_matmul_backward(benchmark::State& state) {
    int n = static_cast<int>(state.range(0));
    ParamStore store;
    Rng rng(1);
    Param& a = store.create("a", {n, n});
    Param& b = store.create("b", {n, n});
    a.value = random_tensor({n, n}, rng);
    b.value = random_tensor({n, n}, rng);
    for (auto _ : state) {
        Graph g;
        Var loss = g.sum(g.matmul(g.param(a), g.param(b)));
        g.backward(loss);
        benchmark::DoNotOptimize(a.grad.at(0, 0));
        a.grad.fill(0.0f);
        b.grad.fill(0.0f);
    }
}
BENCHMARK(bm_matmul_backward)->Arg(32)->Arg(128);

struct EncoderFixture {
    Corpus corpus;
    Vocabulary vocab;
    ParamStore store;
    std::optional<BaselineModel> model;

    EncoderFixture() {
        GrammarConfig gc;
        gc.seed = 7;
        gc.sentences = 64;
        corpus = generate_corpus(gc);
        vocab = Vocabulary::build(corpus);
        BaselineConfig cfg;
        cfg.emb.d_w = 64;
        cfg.emb.d_dep = 16;
        cfg.emb.d_pos = 16;
        cfg.d_h = 64;
        cfg.layers = 1;
        cfg.d_rho0 = 48;
        cfg.d_rho1 = 32;
        cfg.d_pi = 32;
        cfg.dropout = 0.0f;
        cfg.rdropout = 0.0f;
        Rng init(5);
        model.emplace(store, vocab, cfg, init);
    }
};

void bm_encoder_forward(benchmark::State& state) {
    EncoderFixture fx;
    const Sentence& sent = fx.corpus[0];
    for (auto _ : state) {
        Graph g;
        Rng rng(0);
        auto enc = fx.model->encode(g, sent, false, rng);
        benchmark::DoNotOptimize(g.value(enc.h).at(0, 0));
    }
}
BENCHMARK(bm_encoder_forward);

void bm_instance_score(benchmark::State& state) {
    EncoderFixture fx;
    const Sentence& sent = fx.corpus[0];
    int j = sent.predicate_positions()[0];
    std::string plemma = sent.tokens[static_cast<std::size_t>(j - 1)].plemma;
    for (auto _ : state) {
        Graph g;
        Rng rng(0);
        auto out = fx.model->run(g, sent, j, plemma, false, rng);
        benchmark::DoNotOptimize(g.value(out.i_alpha).at(0, 0));
    }
}
BENCHMARK(bm_instance_score);

void bm_refinement_step(benchmark::State& state) {
    RefinerConfig cfg;
    cfg.d_h = 64;
    cfg.layers = 1;
    cfg.d_g = 64;
    cfg.d_r = 64;
    cfg.d_pi = 32;
    cfg.dropout = 0.0f;
    cfg.rdropout = 0.0f;
    ParamStore store;
    Rng init(5);
    RefinerModel refiner(store, 96, 5, cfg, init);
    Rng data(9);
    Tensor x = random_tensor({12, 96}, data);
    Tensor i_alpha = random_tensor({12, 5}, data);
    Tensor i_pi = random_tensor({2}, data);
    Tensor pi = random_tensor({2, 32}, data);
    for (auto _ : state) {
        Graph g;
        Rng rng(0);
        Var ia = g.constant(i_alpha), ip = g.constant(i_pi);
        auto steps = refiner.iterate(g, g.constant(x), ia, ip, g.constant(pi),
                                     g.softmax_rows(ia), g.softmax_vec(ip), 4, 1, false, rng);
        benchmark::DoNotOptimize(g.value(steps[1].R).at(0, 0));
    }
}
BENCHMARK(bm_refinement_step);

void bm_corpus_parse(benchmark::State& state) {
    GrammarConfig gc;
    gc.seed = 7;
    gc.sentences = 256;
    std::string text = write_corpus(generate_corpus(gc));
    for (auto _ : state) {
        Corpus c = parse_corpus_text(text);
        benchmark::DoNotOptimize(c.size());
    }
}
BENCHMARK(bm_corpus_parse);

}  // namespace

BENCHMARK_MAIN();
