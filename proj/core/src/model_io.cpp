#include "srl/model_io.hpp"

#include <cstdio>

#include "srl/checkpoint.hpp"
#include "srl/common.hpp"

namespace srl {
namespace {

std::string fmt_float(double v) {
    char buf[32];
    std::snprintf(buf, sizeof(buf), "%.9g", static_cast<double>(v));
    return buf;
}

int meta_int(const Checkpoint& ckpt, const std::string& key) {
    auto it = ckpt.meta.find(key);
    require(it != ckpt.meta.end(), "checkpoint lacks meta key: ", key);
    return std::stoi(it->second);
}

double meta_float(const Checkpoint& ckpt, const std::string& key) {
    auto it = ckpt.meta.find(key);
    require(it != ckpt.meta.end(), "checkpoint lacks meta key: ", key);
    return std::stod(it->second);
}

std::string meta_str(const Checkpoint& ckpt, const std::string& key) {
    auto it = ckpt.meta.find(key);
    require(it != ckpt.meta.end(), "checkpoint lacks meta key: ", key);
    return it->second;
}

}  // namespace

void save_baseline(const std::string& path, const ParamStore& store, const Vocabulary& vocab,
                   const BaselineConfig& cfg) {
    Checkpoint ckpt = Checkpoint::from_params(store);
    ckpt.meta["kind"] = "baseline";
    ckpt.meta["vocab_hash"] = hash_hex(vocab.content_hash());
    ckpt.meta["d_w"] = std::to_string(cfg.emb.d_w);
    ckpt.meta["d_dep"] = std::to_string(cfg.emb.d_dep);
    ckpt.meta["d_pos"] = std::to_string(cfg.emb.d_pos);
    ckpt.meta["d_h"] = std::to_string(cfg.d_h);
    ckpt.meta["layers"] = std::to_string(cfg.layers);
    ckpt.meta["d_rho0"] = std::to_string(cfg.d_rho0);
    ckpt.meta["d_rho1"] = std::to_string(cfg.d_rho1);
    ckpt.meta["d_pi"] = std::to_string(cfg.d_pi);
    ckpt.meta["dropout"] = fmt_float(cfg.dropout);
    ckpt.meta["rdropout"] = fmt_float(cfg.rdropout);
    ckpt.save(path);
}

BaselineModel load_baseline(const std::string& path, ParamStore& store,
                            const Vocabulary& vocab) {
    Checkpoint ckpt = Checkpoint::load(path);
    require(meta_str(ckpt, "kind") == "baseline", path, " is not a baseline checkpoint");
    require(meta_str(ckpt, "vocab_hash") == hash_hex(vocab.content_hash()),
            "vocabulary hash mismatch: checkpoint ", meta_str(ckpt, "vocab_hash"),
            ", vocabulary ", hash_hex(vocab.content_hash()));
    BaselineConfig cfg;
    cfg.emb.d_w = meta_int(ckpt, "d_w");
    cfg.emb.d_dep = meta_int(ckpt, "d_dep");
    cfg.emb.d_pos = meta_int(ckpt, "d_pos");
    cfg.d_h = meta_int(ckpt, "d_h");
    cfg.layers = meta_int(ckpt, "layers");
    cfg.d_rho0 = meta_int(ckpt, "d_rho0");
    cfg.d_rho1 = meta_int(ckpt, "d_rho1");
    cfg.d_pi = meta_int(ckpt, "d_pi");
    cfg.dropout = meta_float(ckpt, "dropout");
    cfg.rdropout = meta_float(ckpt, "rdropout");
    Rng init(0);
    BaselineModel model(store, vocab, cfg, init);
    ckpt.load_into(store);
    return model;
}

void save_refiner(const std::string& path, const ParamStore& store, const RefinerConfig& cfg,
                  int input_width, int n_roles, const std::string& baseline_hash_hex,
                  const std::string& vocab_hash_hex) {
    Checkpoint ckpt = Checkpoint::from_params(store);
    ckpt.meta["kind"] = "refiner";
    ckpt.meta["baseline_hash"] = baseline_hash_hex;
    ckpt.meta["vocab_hash"] = vocab_hash_hex;
    ckpt.meta["input_width"] = std::to_string(input_width);
    ckpt.meta["n_roles"] = std::to_string(n_roles);
    ckpt.meta["d_h"] = std::to_string(cfg.d_h);
    ckpt.meta["layers"] = std::to_string(cfg.layers);
    ckpt.meta["d_g"] = std::to_string(cfg.d_g);
    ckpt.meta["d_r"] = std::to_string(cfg.d_r);
    ckpt.meta["d_pi"] = std::to_string(cfg.d_pi);
    ckpt.meta["structured"] = cfg.structured ? "true" : "false";
    ckpt.meta["tied"] = cfg.tied ? "true" : "false";
    ckpt.meta["dropout"] = fmt_float(cfg.dropout);
    ckpt.meta["rdropout"] = fmt_float(cfg.rdropout);
    ckpt.save(path);
}

LoadedRefiner load_refiner(const std::string& path, ParamStore& store) {
    Checkpoint ckpt = Checkpoint::load(path);
    require(meta_str(ckpt, "kind") == "refiner", path, " is not a refiner checkpoint");
    RefinerConfig cfg;
    cfg.d_h = meta_int(ckpt, "d_h");
    cfg.layers = meta_int(ckpt, "layers");
    cfg.d_g = meta_int(ckpt, "d_g");
    cfg.d_r = meta_int(ckpt, "d_r");
    cfg.d_pi = meta_int(ckpt, "d_pi");
    cfg.structured = meta_str(ckpt, "structured") == "true";
    cfg.tied = meta_str(ckpt, "tied") == "true";
    cfg.dropout = meta_float(ckpt, "dropout");
    cfg.rdropout = meta_float(ckpt, "rdropout");
    int input_width = meta_int(ckpt, "input_width");
    int n_roles = meta_int(ckpt, "n_roles");
    Rng init(0);
    RefinerModel model(store, input_width, n_roles, cfg, init);
    ckpt.load_into(store);
    return {model, meta_str(ckpt, "baseline_hash"), meta_str(ckpt, "vocab_hash")};
}

}  // namespace srl
