#include <limits>
#include <sstream>

#include <doctest.h>

#include "srl/model_io.hpp"
#include "srl/synth.hpp"
#include "srl/trainer.hpp"

using namespace srl;

namespace {

GrammarConfig tiny_grammar(int sentences) {
    GrammarConfig c;
    c.seed = 7;
    c.sentences = sentences;
    return c;
}

BaselineConfig tiny_baseline_config() {
    BaselineConfig cfg;
    cfg.emb.d_w = 12;
    cfg.emb.d_dep = 6;
    cfg.emb.d_pos = 6;
    cfg.d_h = 10;
    cfg.layers = 1;
    cfg.d_rho0 = 10;
    cfg.d_rho1 = 6;
    cfg.d_pi = 6;
    cfg.dropout = 0.0f;
    cfg.rdropout = 0.0f;
    return cfg;
}

RefinerConfig tiny_refiner_config(bool structured) {
    RefinerConfig cfg;
    cfg.d_h = 8;
    cfg.layers = 1;
    cfg.d_g = 8;
    cfg.d_r = 8;
    cfg.d_pi = 6;
    cfg.structured = structured;
    cfg.tied = true;
    cfg.dropout = 0.0f;
    cfg.rdropout = 0.0f;
    return cfg;
}

TrainOptions fast_options(int epochs) {
    TrainOptions opts;
    opts.epochs = epochs;
    opts.batch = 8;
    opts.lr = 3e-3f;
    opts.patience = 1000;
    opts.seed = 5;
    opts.iterations = 1;
    opts.threads = 2;
    return opts;
}

struct Fixture {
    Corpus train, dev;
    Vocabulary vocab;

    explicit Fixture(int n_train = 16, int n_dev = 6) {
        Corpus corpus = generate_corpus(tiny_grammar(n_train + n_dev));
        auto splits = split_corpus_counts(corpus, {n_train, n_dev}, 7);
        train = splits[0];
        dev = splits[1];
        vocab = Vocabulary::build(train);
    }
};

}  // namespace

TEST_CASE("baseline training is deterministic given a seed") {
    Fixture fx;
    auto run = [&]() {
        ParamStore store;
        Rng init(3);
        BaselineModel model(store, fx.vocab, tiny_baseline_config(), init);
        std::ostringstream log;
        TrainResult res = train_baseline(model, fx.train, fx.dev, fast_options(3), log);
        return std::tuple<std::string, double, std::vector<Tensor>>(
            log.str(), res.best_dev_f1, store.snapshot_values());
    };
    auto [log_a, f1_a, params_a] = run();
    auto [log_b, f1_b, params_b] = run();
    CHECK(log_a == log_b);  // identical dev trajectory line for line
    CHECK(f1_a == f1_b);
    REQUIRE(params_a.size() == params_b.size());
    for (std::size_t i = 0; i < params_a.size(); ++i) CHECK(params_a[i] == params_b[i]);
    CHECK(log_a.find("split dev loss") != std::string::npos);
}

TEST_CASE("zero epochs leave the parameters at initialization") {
    Fixture fx;
    ParamStore store;
    Rng init(3);
    BaselineModel model(store, fx.vocab, tiny_baseline_config(), init);
    auto before = store.snapshot_values();
    std::ostringstream log;
    TrainResult res = train_baseline(model, fx.train, fx.dev, fast_options(0), log);
    auto after = store.snapshot_values();
    CHECK(res.epochs_run == 0);
    REQUIRE(before.size() == after.size());
    for (std::size_t i = 0; i < before.size(); ++i) CHECK(before[i] == after[i]);
}

TEST_CASE("the baseline can overfit a small training set") {
    Fixture fx(10, 4);
    ParamStore store;
    Rng init(3);
    BaselineModel model(store, fx.vocab, tiny_baseline_config(), init);
    std::ostringstream log;
    train_baseline(model, fx.train, fx.dev, fast_options(60), log);
    auto preds = predict_instances(model, nullptr, fx.train, 0, 2);
    EvalReport rep = evaluate_predictions(extract_instances(fx.train), preds);
    INFO(log.str());
    CHECK(rep.f1 >= 0.9);
}

TEST_CASE("frozen outputs match a direct forward pass") {
    Fixture fx;
    ParamStore store;
    Rng init(3);
    BaselineModel model(store, fx.vocab, tiny_baseline_config(), init);
    auto frozen = freeze_baseline_outputs(model, fx.dev, 3);
    auto instances = extract_instances(fx.dev);
    REQUIRE(frozen.size() == instances.size());
    for (std::size_t k = 0; k < frozen.size(); ++k) {
        const Sentence& sent = fx.dev[static_cast<std::size_t>(frozen[k].sentence_index)];
        Graph g;
        Rng rng(0);
        auto out = model.run(g, sent, frozen[k].j,
                             sent.tokens[static_cast<std::size_t>(frozen[k].j - 1)].plemma,
                             false, rng);
        CHECK(frozen[k].i_alpha == g.value(out.i_alpha));
        CHECK(frozen[k].i_pi == g.value(out.i_pi));
        CHECK(frozen[k].x == g.value(out.x));
    }
}

TEST_CASE("gumbel flip fractions are zero without noise and bounded with it") {
    Fixture fx;
    ParamStore store;
    Rng init(3);
    BaselineModel model(store, fx.vocab, tiny_baseline_config(), init);
    auto frozen = freeze_baseline_outputs(model, fx.train, 2);
    Rng rng(9);
    CHECK(gumbel_flip_fraction(frozen, 0.0f, rng) == 0.0);
    CHECK(gumbel_sense_flip_fraction(frozen, 0.0f, rng) == 0.0);
    double flips = gumbel_flip_fraction(frozen, 5.0f, rng);
    CHECK(flips >= 0.0);
    CHECK(flips <= 1.0);
}

TEST_CASE("refiner training is deterministic and logs the flip fractions") {
    Fixture fx;
    ParamStore bstore;
    Rng init(3);
    BaselineModel baseline(bstore, fx.vocab, tiny_baseline_config(), init);
    std::ostringstream blog;
    train_baseline(baseline, fx.train, fx.dev, fast_options(2), blog);

    auto run = [&]() {
        ParamStore rstore;
        Rng rinit(11);
        RefinerModel refiner(rstore, baseline.input_width(), fx.vocab.n_roles(),
                             tiny_refiner_config(true), rinit);
        std::ostringstream log;
        TrainResult res = train_refiner(refiner, baseline, fx.train, fx.dev,
                                        fast_options(2), log);
        return std::tuple<std::string, double, double, std::vector<Tensor>>(
            log.str(), res.role_flip_fraction, res.best_dev_f1, rstore.snapshot_values());
    };
    auto [log_a, flips_a, f1_a, params_a] = run();
    auto [log_b, flips_b, f1_b, params_b] = run();
    CHECK(log_a == log_b);
    CHECK(flips_a == flips_b);
    CHECK(f1_a == f1_b);
    for (std::size_t i = 0; i < params_a.size(); ++i) CHECK(params_a[i] == params_b[i]);
    CHECK(log_a.find("gumbel role flip fraction") != std::string::npos);
    CHECK(log_a.find("gumbel sense flip fraction") != std::string::npos);
    CHECK(flips_a >= 0.0);
    CHECK(flips_a <= 1.0);
}

TEST_CASE("stage two never touches the baseline parameters") {
    Fixture fx;
    ParamStore bstore;
    Rng init(3);
    BaselineModel baseline(bstore, fx.vocab, tiny_baseline_config(), init);
    auto before = bstore.snapshot_values();
    ParamStore rstore;
    Rng rinit(11);
    RefinerModel refiner(rstore, baseline.input_width(), fx.vocab.n_roles(),
                         tiny_refiner_config(true), rinit);
    std::ostringstream log;
    train_refiner(refiner, baseline, fx.train, fx.dev, fast_options(2), log);
    auto after = bstore.snapshot_values();
    REQUIRE(before.size() == after.size());
    for (std::size_t i = 0; i < before.size(); ++i) CHECK(before[i] == after[i]);
}

TEST_CASE("decoding with zero iterations or no refiner reproduces the baseline") {
    Fixture fx;
    ParamStore bstore;
    Rng init(3);
    BaselineModel baseline(bstore, fx.vocab, tiny_baseline_config(), init);
    ParamStore rstore;
    Rng rinit(11);
    RefinerModel refiner(rstore, baseline.input_width(), fx.vocab.n_roles(),
                         tiny_refiner_config(true), rinit);

    auto plain = predict_instances(baseline, nullptr, fx.dev, 0, 2);
    auto zero_iters = predict_instances(baseline, &refiner, fx.dev, 0, 2);
    auto noop_refiner = predict_instances(baseline, &refiner, fx.dev, 2, 1);
    REQUIRE(plain.size() == zero_iters.size());
    for (std::size_t k = 0; k < plain.size(); ++k) {
        CHECK(plain[k].sense == zero_iters[k].sense);
        CHECK(plain[k].roles == zero_iters[k].roles);
        CHECK(plain[k].sense == noop_refiner[k].sense);
        CHECK(plain[k].roles == noop_refiner[k].roles);
    }
}

TEST_CASE("training aborts an epoch on non-finite loss and logs the batch") {
    Fixture fx;
    ParamStore store;
    Rng init(3);
    BaselineModel model(store, fx.vocab, tiny_baseline_config(), init);
    store.get("baseline.bi_null.b").value.at(0) = std::numeric_limits<double>::infinity();
    std::ostringstream log;
    TrainOptions opts = fast_options(1);
    CHECK_NOTHROW(train_baseline(model, fx.train, fx.dev, opts, log));
    CHECK(log.str().find("non-finite loss") != std::string::npos);
}
