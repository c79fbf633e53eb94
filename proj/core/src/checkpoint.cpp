#include "srl/checkpoint.hpp"

#include <bit>
#include <fstream>
#include <sstream>

#include "srl/common.hpp"

namespace srl {

void Checkpoint::put(const std::string& name, Tensor t) {
    require(!tensors_.count(name), "duplicate checkpoint tensor: ", name);
    tensors_.emplace(name, std::move(t));
    order_.push_back(name);
}

const Tensor& Checkpoint::tensor(const std::string& name) const {
    auto it = tensors_.find(name);
    require(it != tensors_.end(), "checkpoint has no tensor named ", name);
    return it->second;
}

bool Checkpoint::has_tensor(const std::string& name) const { return tensors_.count(name) > 0; }

void Checkpoint::save(const std::string& path) const {
    std::ostringstream header;
    header << "SRLCKPT 1\n";
    for (const auto& [k, v] : meta) {
        require(k.find_first_of(" \n") == std::string::npos, "bad meta key: ", k);
        require(v.find('\n') == std::string::npos, "meta value may not contain newlines: ", k);
        header << "meta " << k << " " << v << "\n";
    }
    std::size_t offset = 0;
    for (const auto& name : order_) {
        const Tensor& t = tensors_.at(name);
        header << "tensor " << percent_encode(name) << " " << t.rank();
        for (int d : t.shape()) header << " " << d;
        header << " " << offset << "\n";
        offset += t.size() * 8;
    }
    header << "end\n";

    std::ofstream out(path, std::ios::binary);
    require(out.good(), "cannot open for writing: ", path);
    std::string h = header.str();
    out.write(h.data(), static_cast<std::streamsize>(h.size()));
    for (const auto& name : order_) {
        const Tensor& t = tensors_.at(name);
        for (double f : t.values()) {
            auto bits = std::bit_cast<std::uint64_t>(f);
            char b[8];
            for (int i = 0; i < 8; ++i) b[i] = static_cast<char>((bits >> (8 * i)) & 0xff);
            out.write(b, 8);
        }
    }
    out.flush();
    require(out.good(), "write failed: ", path);
}

Checkpoint Checkpoint::load(const std::string& path) {
    std::ifstream in(path, std::ios::binary);
    require(in.good(), "cannot open checkpoint: ", path);
    std::string content((std::istreambuf_iterator<char>(in)), std::istreambuf_iterator<char>());

    Checkpoint ckpt;
    std::size_t pos = 0;
    auto next_line = [&]() {
        std::size_t nl = content.find('\n', pos);
        require(nl != std::string::npos, "truncated checkpoint header: ", path);
        std::string line = content.substr(pos, nl - pos);
        pos = nl + 1;
        return line;
    };

    require(next_line() == "SRLCKPT 1", "not a checkpoint file (bad magic): ", path);
    struct Entry {
        std::string name;
        std::vector<int> shape;
        std::size_t offset;
    };
    std::vector<Entry> entries;
    for (;;) {
        std::string line = next_line();
        if (line == "end") break;
        std::istringstream ls(line);
        std::string kind;
        ls >> kind;
        if (kind == "meta") {
            std::string key;
            ls >> key;
            std::string value;
            std::getline(ls, value);
            if (!value.empty() && value[0] == ' ') value.erase(0, 1);
            ckpt.meta[key] = value;
        } else if (kind == "tensor") {
            Entry e;
            std::string encoded;
            int rank = -1;
            ls >> encoded >> rank;
            require(!ls.fail() && rank >= 0 && rank <= 8, "bad tensor line: ", line);
            e.name = percent_decode(encoded);
            for (int i = 0; i < rank; ++i) {
                int d = -1;
                ls >> d;
                require(!ls.fail() && d >= 0, "bad tensor dims: ", line);
                e.shape.push_back(d);
            }
            ls >> e.offset;
            require(!ls.fail(), "bad tensor offset: ", line);
            entries.push_back(std::move(e));
        } else {
            fail(strcat_msg("unknown checkpoint header line: ", line));
        }
    }

    const char* payload = content.data() + pos;
    std::size_t payload_len = content.size() - pos;
    for (auto& e : entries) {
        Tensor t(e.shape);
        require(e.offset + t.size() * 8 <= payload_len, "truncated checkpoint payload for ",
                e.name, " in ", path);
        const unsigned char* src =
            reinterpret_cast<const unsigned char*>(payload + e.offset);
        for (std::size_t i = 0; i < t.size(); ++i) {
            std::uint64_t bits = 0;
            for (int b = 0; b < 8; ++b)
                bits |= static_cast<std::uint64_t>(src[8 * i + b]) << (8 * b);
            t.values()[i] = std::bit_cast<double>(bits);
        }
        ckpt.put(e.name, std::move(t));
    }
    return ckpt;
}

Checkpoint Checkpoint::from_params(const ParamStore& params) {
    Checkpoint ckpt;
    for (std::size_t i = 0; i < params.count(); ++i) {
        const Param& p = params.at(i);
        ckpt.put(p.name, p.value);
    }
    return ckpt;
}

void Checkpoint::load_into(ParamStore& params) const {
    require(order_.size() == params.count(), "checkpoint holds ", order_.size(),
            " tensors but the model has ", params.count(), " parameters");
    for (const auto& name : order_) {
        require(params.has(name), "checkpoint tensor has no matching parameter: ", name);
        Param& p = params.get(name);
        const Tensor& t = tensors_.at(name);
        require(t.same_shape(p.value), "shape mismatch for ", name, ": checkpoint ",
                t.shape_str(), " vs model ", p.value.shape_str());
        p.value = t;
    }
}

std::uint64_t hash64(const void* data, std::size_t len) {
    const unsigned char* p = static_cast<const unsigned char*>(data);
    std::uint64_t h = 0xcbf29ce484222325ULL;
    for (std::size_t i = 0; i < len; ++i) {
        h ^= p[i];
        h *= 0x100000001b3ULL;
    }
    return h;
}

std::uint64_t hash64_str(const std::string& s) { return hash64(s.data(), s.size()); }

std::uint64_t hash64_file(const std::string& path) {
    std::ifstream in(path, std::ios::binary);
    require(in.good(), "cannot open for hashing: ", path);
    std::string content((std::istreambuf_iterator<char>(in)), std::istreambuf_iterator<char>());
    return hash64_str(content);
}

std::string hash_hex(std::uint64_t h) {
    static const char* digits = "0123456789abcdef";
    std::string s(16, '0');
    for (int i = 15; i >= 0; --i) {
        s[static_cast<std::size_t>(i)] = digits[h & 0xf];
        h >>= 4;
    }
    return s;
}

std::string percent_encode(const std::string& s) {
    static const char* digits = "0123456789abcdef";
    std::string out;
    for (unsigned char c : s) {
        if (c <= 0x20 || c == '%' || c == 0x7f) {
            out += '%';
            out += digits[c >> 4];
            out += digits[c & 0xf];
        } else {
            out += static_cast<char>(c);
        }
    }
    return out;
}

std::string percent_decode(const std::string& s) {
    auto hex = [](char c) -> int {
        if ('0' <= c && c <= '9') return c - '0';
        if ('a' <= c && c <= 'f') return c - 'a' + 10;
        if ('A' <= c && c <= 'F') return c - 'A' + 10;
        return -1;
    };
    std::string out;
    for (std::size_t i = 0; i < s.size(); ++i) {
        if (s[i] == '%') {
            require(i + 2 < s.size(), "truncated percent escape in ", s);
            int hi = hex(s[i + 1]), lo = hex(s[i + 2]);
            require(hi >= 0 && lo >= 0, "bad percent escape in ", s);
            out += static_cast<char>((hi << 4) | lo);
            i += 2;
        } else {
            out += s[i];
        }
    }
    return out;
}

}  // namespace srl
