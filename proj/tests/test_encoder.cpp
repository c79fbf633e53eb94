#include <cmath>

#include <doctest.h>

#include "srl/encoder.hpp"
#include "srl/gradcheck.hpp"

using namespace srl;

namespace {

Tensor random_rows(int n, int d, Rng& rng) {
    Tensor t({n, d});
    for (auto& x : t.values()) x = static_cast<double>(rng.normal(0, 0.8));
    return t;
}

Tensor reversed_rows(const Tensor& m) {
    Tensor out({m.rows(), m.cols()});
    for (int i = 0; i < m.rows(); ++i)
        for (int j = 0; j < m.cols(); ++j) out.at(i, j) = m.at(m.rows() - 1 - i, j);
    return out;
}

}  // namespace

TEST_CASE("xavier init stays inside its bound") {
    Rng rng(3);
    Tensor t({6, 10});
    init_xavier(t, rng);
    double bound = std::sqrt(6.0f / (6 + 10));
    for (double x : t.values()) {
        CHECK(x <= bound);
        CHECK(x >= -bound);
    }
}

TEST_CASE("one-layer feature extractor computes elu of an affine map") {
    ParamStore store;
    Rng rng(1);
    create_mlp(store, "m", 2, 2, rng);
    store.get("m.W").value = Tensor::from({2, 2}, {1, 0, 0, 1});
    store.get("m.b").value = Tensor::from({2}, {0.0f, -3.0f});
    Graph g;
    Var out = mlp_vec(g, store, "m", g.constant(Tensor::from({2}, {2.0f, 1.0f})));
    CHECK(g.value(out).at(0) == doctest::Approx(2.0).epsilon(1e-6));
    CHECK(g.value(out).at(1) == doctest::Approx(std::exp(-2.0) - 1.0).epsilon(1e-6));

    Var rows = mlp_rows(g, store, "m", g.constant(Tensor::from({1, 2}, {2.0f, 1.0f})));
    CHECK(g.value(rows).at(0, 0) == g.value(out).at(0));
    CHECK(g.value(rows).at(0, 1) == g.value(out).at(1));
}

TEST_CASE("encoder output has twice the hidden width and is deterministic") {
    ParamStore store;
    Rng init(5);
    Encoder enc(store, "enc", 4, 3, 2, init);
    Rng data(9);
    Tensor x = random_rows(5, 4, data);
    auto run = [&](bool train, std::uint64_t seed) {
        Graph g;
        Rng rng(seed);
        return g.value(enc.apply(g, g.constant(x), train, 0.3f, 0.3f, rng));
    };
    Tensor eval1 = run(false, 1);
    CHECK(eval1.rows() == 5);
    CHECK(eval1.cols() == 6);
    CHECK(eval1 == run(false, 2));         // eval mode never draws
    CHECK(run(true, 7) == run(true, 7));   // train mode draws deterministically
    CHECK(run(true, 7) != run(true, 8));
}

TEST_CASE("direction-symmetric weights make reversal swap the output halves") {
    ParamStore store;
    Rng init(11);
    int d_in = 4, d_h = 3;
    Encoder enc(store, "enc", d_in, d_h, 1, init);
    store.get("enc.l0.bwd.W").value = store.get("enc.l0.fwd.W").value;
    store.get("enc.l0.bwd.b").value = store.get("enc.l0.fwd.b").value;
    // Mirror the highway halves so the swap symmetry survives gating.
    for (const char* name : {"enc.l0.hw.gate.W", "enc.l0.hw.proj.W"}) {
        Tensor& w = store.get(name).value;
        for (int i = 0; i < d_h; ++i)
            for (int j = 0; j < w.cols(); ++j) w.at(d_h + i, j) = w.at(i, j);
    }

    Rng data(21);
    Tensor x = random_rows(5, d_in, data);
    Rng r1(0), r2(0);
    Graph g;
    Tensor fwd = g.value(enc.apply(g, g.constant(x), false, 0, 0, r1));
    Tensor rev = g.value(enc.apply(g, g.constant(reversed_rows(x)), false, 0, 0, r2));
    for (int i = 0; i < 5; ++i) {
        for (int j = 0; j < d_h; ++j) {
            CHECK(rev.at(i, j) ==
                  doctest::Approx(fwd.at(4 - i, d_h + j)).epsilon(1e-5));
            CHECK(rev.at(i, d_h + j) ==
                  doctest::Approx(fwd.at(4 - i, j)).epsilon(1e-5));
        }
    }
}

TEST_CASE("gradients flow through a full encoder pass") {
    ParamStore store;
    Rng init(17);
    Encoder enc(store, "enc", 5, 2, 1, init);
    Rng data(23);
    Tensor x = random_rows(2, 5, data);
    GradCheckReport rep = gradient_check(store, [&](Graph& g) {
        Rng rng(0);
        return g.sum(enc.apply(g, g.constant(x), false, 0, 0, rng));
    });
    INFO(rep.worst);
    CHECK(rep.max_rel_err < 1e-4);
}
