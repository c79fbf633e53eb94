#pragma once

#include <cstdint>
#include <map>
#include <string>
#include <vector>

#include "srl/graph.hpp"
#include "srl/tensor.hpp"

namespace srl {

// Single-file tensor container. Layout:
//   SRLCKPT 1\n
//   meta <key> <value>\n            (zero or more, sorted by key)
//   tensor <name> <rank> <dims...> <byte-offset>\n
//   end\n
//   <payload: little-endian float32, tensors back to back>
// Names are percent-encoded in the manifest so arbitrary lemma strings
// survive. Round trips are bit-exact.
class Checkpoint {
public:
    std::map<std::string, std::string> meta;

    void put(const std::string& name, Tensor t);
    const Tensor& tensor(const std::string& name) const;
    bool has_tensor(const std::string& name) const;
    const std::vector<std::string>& names() const { return order_; }

    void save(const std::string& path) const;
    static Checkpoint load(const std::string& path);

    // Snapshot every parameter in store order.
    static Checkpoint from_params(const ParamStore& params);
    // Strict restore: the checkpoint and the store must hold exactly the
    // same names with the same shapes.
    void load_into(ParamStore& params) const;

private:
    std::map<std::string, Tensor> tensors_;
    std::vector<std::string> order_;
};

// FNV-1a 64-bit content hashes, used to link refiner checkpoints to the
// baseline they were trained against and models to their vocabulary.
std::uint64_t hash64(const void* data, std::size_t len);
std::uint64_t hash64_str(const std::string& s);
std::uint64_t hash64_file(const std::string& path);
std::string hash_hex(std::uint64_t h);

std::string percent_encode(const std::string& s);
std::string percent_decode(const std::string& s);

}  // namespace srl
