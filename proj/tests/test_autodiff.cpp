#include <cmath>
#include <vector>

#include <doctest.h>

#include "srl/common.hpp"
#include "srl/gradcheck.hpp"
#include "srl/graph.hpp"
#include "srl/optimizer.hpp"
#include "srl/tensor.hpp"

using namespace srl;

TEST_CASE("tensor basics") {
    Tensor t = Tensor::from({2, 3}, {1, 2, 3, 4, 5, 6});
    CHECK(t.rows() == 2);
    CHECK(t.cols() == 3);
    CHECK(t.at(1, 2) == 6.0f);
    CHECK(Tensor::scalar(4.0f).item() == 4.0f);
    CHECK_THROWS_AS(Tensor::from({2, 2}, {1, 2, 3}), Error);
    CHECK(argmax(Tensor::from({3}, {1, 3, 3})) == 1);  // ties break low
}

TEST_CASE("softmax of uniform logits") {
    Graph g;
    Var v = g.constant(Tensor::from({3}, {0, 0, 0}));
    const Tensor& s = g.value(g.softmax_vec(v));
    for (int i = 0; i < 3; ++i) CHECK(s.at(i) == doctest::Approx(1.0 / 3).epsilon(1e-6));
}

TEST_CASE("elementwise op values") {
    Graph g;
    Var x = g.constant(Tensor::from({3}, {2.0f, 0.0f, -1.0f}));
    Tensor e = g.value(g.elu(x));
    CHECK(e.at(0) == 2.0f);
    CHECK(e.at(1) == 0.0f);
    CHECK(e.at(2) == doctest::Approx(std::exp(-1.0) - 1.0).epsilon(1e-6));
    CHECK(g.value(g.sigmoid(g.constant(Tensor::from({1}, {0})))).at(0) == 0.5f);
    Var c = g.concat_vec({g.constant(Tensor::from({1}, {1})),
                          g.constant(Tensor::from({2}, {2, 3}))});
    CHECK(g.value(c).values() == std::vector<double>{1, 2, 3});
}

TEST_CASE("shape mismatch reports both shapes") {
    Graph g;
    Var a = g.constant(Tensor::zeros({2, 3}));
    Var b = g.constant(Tensor::zeros({3, 3}));
    CHECK_THROWS_WITH_AS(g.add(a, b), doctest::Contains("[2, 3]"), Error);
}

TEST_CASE("gradient of sum(W x) is the outer structure") {
    ParamStore store;
    Param& w = store.create("W", {2, 2});
    w.value = Tensor::from({2, 2}, {1, 2, 3, 4});
    Graph g;
    Var x = g.constant(Tensor::from({2}, {1, 1}));
    Var loss = g.sum(g.matvec(g.param(w), x));
    g.backward(loss);
    CHECK(w.grad.values() == std::vector<double>{1, 1, 1, 1});
}

TEST_CASE("softmax-pick gradient equals p(1-p) and matches central differences") {
    ParamStore store;
    Param& v = store.create("v", {3});
    v.value = Tensor::from({3}, {0.3f, -0.2f, 0.9f});
    Graph g;
    Var loss = g.pick(g.softmax_vec(g.param(v)), 1);
    g.backward(loss);
    double p = g.value(g.softmax_vec(g.constant(v.value))).at(1);
    CHECK(v.grad.at(1) == doctest::Approx(p * (1 - p)).epsilon(1e-5));

    const double h = 1e-3;
    double kept = v.value.at(1);
    v.value.at(1) = kept + static_cast<double>(h);
    Graph gp;
    double up = gp.value(gp.pick(gp.softmax_vec(gp.param(v)), 1)).at(0);
    v.value.at(1) = kept - static_cast<double>(h);
    Graph gm;
    double down = gm.value(gm.pick(gm.softmax_vec(gm.param(v)), 1)).at(0);
    v.value.at(1) = kept;
    CHECK(v.grad.at(1) == doctest::Approx((up - down) / (2 * h)).epsilon(1e-3));
}

TEST_CASE("unused parameter gets zero gradient") {
    ParamStore store;
    Param& used = store.create("used", {2});
    used.value = Tensor::from({2}, {1, 2});
    Param& unused = store.create("unused", {2});
    unused.value = Tensor::from({2}, {3, 4});
    Graph g;
    g.param(unused);
    Var loss = g.sum(g.param(used));
    g.backward(loss);
    CHECK(unused.grad.values() == std::vector<double>{0, 0});
    CHECK(used.grad.values() == std::vector<double>{1, 1});
}

TEST_CASE("backward rejects non-scalar loss") {
    Graph g;
    Var v = g.constant(Tensor::from({2}, {1, 2}));
    CHECK_THROWS_AS(g.backward(v), Error);
}

TEST_CASE("row softmax rows are positive and sum to one") {
    Rng rng(11);
    Tensor logits({4, 6});
    for (auto& x : logits.values()) x = static_cast<double>(rng.normal(0, 3));
    Graph g;
    const Tensor& s = g.value(g.softmax_rows(g.constant(logits)));
    for (int i = 0; i < 4; ++i) {
        double sum = 0;
        for (int j = 0; j < 6; ++j) {
            CHECK(s.at(i, j) > 0.0f);
            sum += s.at(i, j);
        }
        CHECK(sum == doctest::Approx(1.0).epsilon(1e-6));
    }
}

TEST_CASE("dropout identity cases and inverted scaling") {
    Rng rng(5);
    Tensor x = Tensor::from({2, 2}, {1, 2, 3, 4});
    Graph g;
    Var in = g.constant(x);
    CHECK(g.value(g.dropout(in, 0.0f, rng, true)) == x);
    CHECK(g.value(g.dropout(in, 0.5f, rng, false)) == x);
    const Tensor& d = g.value(g.dropout(in, 0.5f, rng, true));
    for (int i = 0; i < 4; ++i) {
        double r = d.at(i) / x.at(i);
        CHECK((r == 0.0f || r == 2.0f));
    }
}

TEST_CASE("gumbel softmax at lambda zero is exactly softmax") {
    Rng rng(3);
    Tensor logits = Tensor::from({4}, {0.5f, -1.0f, 2.0f, 0.0f});
    CHECK(gumbel_softmax_vec(logits, 0.0f, rng) == softmax_vec_value(logits));
    Tensor rows = Tensor::from({2, 2}, {1, 2, 3, 4});
    CHECK(gumbel_softmax_rows(rows, 0.0f, rng) == softmax_rows_value(rows));
}

TEST_CASE("gumbel softmax is deterministic under a fixed seed") {
    Tensor logits = Tensor::from({4}, {0.5f, -1.0f, 2.0f, 0.0f});
    Rng a(42), b(42);
    CHECK(gumbel_softmax_vec(logits, 5.0f, a) == gumbel_softmax_vec(logits, 5.0f, b));
}

TEST_CASE("margin loss closed forms") {
    Graph g;
    Var flat = g.constant(Tensor::from({2}, {0, 0}));
    CHECK(g.value(g.margin_ce_vec(flat, 0, 1.0f)).item() ==
          doctest::Approx(std::log(1.0 + std::exp(1.0))).epsilon(1e-6));
    Var easy = g.constant(Tensor::from({2}, {50, 0}));
    CHECK(g.value(g.margin_ce_vec(easy, 0, 1.0f)).item() < 1e-6f);
}

TEST_CASE("margin loss dominates cross entropy on random logits") {
    Rng rng(17);
    Graph g;
    for (int trial = 0; trial < 1000; ++trial) {
        int n = 2 + static_cast<int>(rng.below(6));
        Tensor logits({n});
        for (auto& x : logits.values()) x = static_cast<double>(rng.normal(0, 2));
        int gold = static_cast<int>(rng.below(static_cast<std::uint64_t>(n)));
        Var v = g.constant(logits);
        double with = g.value(g.margin_ce_vec(v, gold, 1.0f)).item();
        double without = g.value(g.margin_ce_vec(v, gold, 0.0f)).item();
        CHECK(with >= without);
    }
}

TEST_CASE("other-token aggregate satisfies the exclusion identity") {
    Rng rng(23);
    Tensor logits({5, 4});
    for (auto& x : logits.values()) x = static_cast<double>(rng.normal(0, 1));
    Tensor r = softmax_rows_value(logits);
    Graph g;
    const Tensor& o = g.value(g.other_role_aggregate(g.constant(r)));
    REQUIRE(o.rows() == 5);
    REQUIRE(o.cols() == 3);
    for (int u = 0; u < 3; ++u) {
        double total = 0;
        for (int k = 0; k < 5; ++k) total += r.at(k, u + 1);
        for (int i = 0; i < 5; ++i)
            CHECK(o.at(i, u) + r.at(i, u + 1) == doctest::Approx(total).epsilon(1e-6));
    }
}

TEST_CASE("backward is deterministic given a seed") {
    auto run = [] {
        ParamStore store;
        Param& w = store.create("W", {3, 3});
        Rng init(9);
        for (auto& x : w.value.values()) x = static_cast<double>(init.normal());
        Rng rng(77);
        Graph g;
        Var x = g.constant(Tensor::from({3}, {0.5f, -1.0f, 2.0f}));
        Var h = g.dropout(g.elu(g.matvec(g.param(w), x)), 0.5f, rng, true);
        g.backward(g.sum(h));
        return w.grad;
    };
    CHECK(run() == run());
}

TEST_CASE("adam first step matches the closed form") {
    ParamStore store;
    Param& p = store.create("p", {1});
    p.value = Tensor::from({1}, {1.0f});
    p.grad = Tensor::from({1}, {0.5f});
    Adam adam(store, AdamConfig{3e-4f, 0.9f, 0.999f, 1e-8f});
    adam.step();
    // m_hat = g, v_hat = g^2: delta = lr * g / (|g| + eps)
    double expect = 1.0 - 3e-4 * 0.5 / (0.5 + 1e-8);
    CHECK(p.value.at(0) == doctest::Approx(expect).epsilon(1e-7));
    CHECK(adam.steps_taken() == 1);
}

TEST_CASE("adam with zero gradient leaves parameters unchanged") {
    ParamStore store;
    Param& p = store.create("p", {2});
    p.value = Tensor::from({2}, {1.0f, -2.0f});
    Adam adam(store);
    adam.step();
    CHECK(p.value.values() == std::vector<double>{1.0f, -2.0f});
    CHECK(adam.steps_taken() == 1);
}

TEST_CASE("two identical gradients move the parameter twice in the same direction") {
    ParamStore store;
    Param& p = store.create("p", {1});
    p.value = Tensor::from({1}, {1.0f});
    Adam adam(store, AdamConfig{1e-2f});
    double before = p.value.at(0);
    p.grad.at(0) = 0.5f;
    adam.step();
    double mid = p.value.at(0);
    p.grad.at(0) = 0.5f;
    adam.step();
    double after = p.value.at(0);
    CHECK(mid < before);
    CHECK(after < mid);
    CHECK(std::isfinite(after));
}

TEST_CASE("adam skips parameters with non-finite gradients") {
    ParamStore store;
    Param& good = store.create("good", {1});
    good.value = Tensor::from({1}, {1.0f});
    Param& bad = store.create("bad", {1});
    bad.value = Tensor::from({1}, {1.0f});
    good.grad.at(0) = 0.5f;
    bad.grad.at(0) = std::numeric_limits<double>::quiet_NaN();
    Adam adam(store);
    adam.step();
    CHECK(good.value.at(0) < 1.0f);
    CHECK(bad.value.at(0) == 1.0f);
    CHECK(adam.skipped_updates() == 1);
}

TEST_CASE("gradient check is exact on a quadratic") {
    ParamStore store;
    Param& x = store.create("x", {1});
    x.value = Tensor::from({1}, {3.0f});
    GradCheckReport rep = gradient_check(store, [&](Graph& g) {
        Var v = g.param(x);
        return g.sum(g.mul(v, v));
    });
    CHECK(rep.max_rel_err < 1e-4);
}

TEST_CASE("gradient check passes on a random biaffine scorer") {
    Rng init(31);
    ParamStore store;
    Param& u = store.create("U", {4, 4});
    Param& w = store.create("w", {8});
    Param& b = store.create("b", {1});
    for (auto& v : u.value.values()) v = static_cast<double>(init.normal(0, 0.5));
    for (auto& v : w.value.values()) v = static_cast<double>(init.normal(0, 0.5));
    b.value.at(0) = 0.1f;
    Tensor pv({4}), av({4});
    for (auto& v : pv.values()) v = static_cast<double>(init.normal());
    for (auto& v : av.values()) v = static_cast<double>(init.normal());
    GradCheckReport rep = gradient_check(store, [&](Graph& g) {
        Var p = g.constant(pv);
        Var a = g.constant(av);
        Var bilinear = g.dot(a, g.vecmat(p, g.param(u)));
        Var linear = g.dot(g.param(w), g.concat_vec({p, a}));
        return g.add(g.add(bilinear, linear), g.sum(g.param(b)));
    });
    INFO(rep.worst);
    CHECK(rep.max_rel_err < 1e-4);
}
