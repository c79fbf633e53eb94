#include <cstdio>
#include <string>

#include <doctest.h>

#include "srl/checkpoint.hpp"
#include "srl/common.hpp"
#include "srl/graph.hpp"
#include "srl/rng.hpp"

using namespace srl;

namespace {

struct TempFile {
    std::string path;
    explicit TempFile(const std::string& name) : path("ckpt_test_" + name) {}
    ~TempFile() { std::remove(path.c_str()); }
};

Tensor random_tensor(std::vector<int> shape, Rng& rng) {
    Tensor t(std::move(shape));
    for (auto& x : t.values()) x = static_cast<double>(rng.normal(0, 2));
    return t;
}

}  // namespace

TEST_CASE("fnv-1a known digests") {
    CHECK(hash64_str("") == 0xcbf29ce484222325ULL);
    CHECK(hash64_str("a") == 0xaf63dc4c8601ec8cULL);
    CHECK(hash_hex(0xcbf29ce484222325ULL) == "cbf29ce484222325");
}

TEST_CASE("percent encoding round trips every byte") {
    std::string all;
    for (int i = 0; i < 256; ++i) all += static_cast<char>(i);
    CHECK(percent_decode(percent_encode(all)) == all);
    CHECK(percent_encode("a b\nc%") != "a b\nc%");
}

TEST_CASE("checkpoint save and load are bit exact") {
    Rng rng(13);
    Checkpoint ck;
    ck.meta["kind"] = "test";
    ck.meta["note"] = "two words";
    ck.put("plain", random_tensor({3, 4}, rng));
    ck.put("sense.satisfy 01%weird\nname", random_tensor({5}, rng));
    ck.put("negative", Tensor::from({2}, {-0.0f, 1e-38f}));

    TempFile f("roundtrip.bin");
    ck.save(f.path);
    Checkpoint back = Checkpoint::load(f.path);
    CHECK(back.meta == ck.meta);
    REQUIRE(back.names() == ck.names());
    for (const std::string& name : ck.names())
        CHECK(back.tensor(name) == ck.tensor(name));

    // Bit exactness of the file itself: saving the loaded copy writes
    // identical bytes, so the content hash is stable.
    TempFile g("roundtrip2.bin");
    back.save(g.path);
    CHECK(hash64_file(f.path) == hash64_file(g.path));
}

TEST_CASE("missing tensors and duplicate names are rejected") {
    Checkpoint ck;
    ck.put("a", Tensor::zeros({2}));
    CHECK_THROWS_AS(ck.tensor("b"), Error);
    CHECK_THROWS_AS(ck.put("a", Tensor::zeros({2})), Error);
}

TEST_CASE("store snapshot restores strictly by name and shape") {
    Rng rng(7);
    ParamStore store;
    store.create("w", {2, 2}).value = random_tensor({2, 2}, rng);
    store.create("b", {2}).value = random_tensor({2}, rng);
    Checkpoint ck = Checkpoint::from_params(store);

    ParamStore same;
    same.create("w", {2, 2});
    same.create("b", {2});
    ck.load_into(same);
    CHECK(same.get("w").value == store.get("w").value);
    CHECK(same.get("b").value == store.get("b").value);

    ParamStore missing;
    missing.create("w", {2, 2});
    CHECK_THROWS_AS(ck.load_into(missing), Error);

    ParamStore wrong_shape;
    wrong_shape.create("w", {2, 2});
    wrong_shape.create("b", {3});
    CHECK_THROWS_AS(ck.load_into(wrong_shape), Error);
}

TEST_CASE("corrupt magic is refused") {
    TempFile f("magic.bin");
    {
        Checkpoint ck;
        ck.put("a", Tensor::zeros({1}));
        ck.save(f.path);
    }
    FILE* fp = std::fopen(f.path.c_str(), "r+b");
    REQUIRE(fp);
    std::fputc('X', fp);
    std::fclose(fp);
    CHECK_THROWS_AS(Checkpoint::load(f.path), Error);
}
