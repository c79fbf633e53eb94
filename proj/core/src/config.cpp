#include "srl/config.hpp"

#include <cstdlib>
#include <fstream>
#include <sstream>

#include "srl/common.hpp"

namespace srl {

Config Config::defaults() {
    Config c;
    auto& v = c.values_;
    v["seed"] = "1";
    v["threads"] = "1";
    // model dimensions
    v["d_w"] = "300";
    v["d_dep"] = "64";
    v["d_pos"] = "64";
    v["d_h"] = "428";
    v["layers"] = "3";
    v["d_rho0"] = "300";
    v["d_rho1"] = "128";
    v["d_pi"] = "128";
    v["d_g"] = "200";
    v["d_r"] = "200";
    v["pretrained"] = "";
    // training
    v["lr"] = "3e-4";
    v["batch"] = "32";
    v["epochs_baseline"] = "600";
    v["epochs_refiner"] = "300";
    v["patience"] = "25";
    v["min_count"] = "1";
    v["lowercase"] = "false";
    v["dropout"] = "0.3";
    v["rdropout"] = "0.3";
    v["iterations"] = "2";
    v["lambda_role"] = "5";
    v["lambda_sense"] = "50";
    v["mode"] = "structured";
    v["tied"] = "true";
    v["gumbel"] = "true";
    // synthetic corpus
    v["synth_sentences"] = "200";
    v["synth_q"] = "1.0";
    v["synth_slot_freq"] = "1.0";
    v["synth_subject_freq"] = "0.35";
    v["synth_distractor_freq"] = "0.5";
    v["synth_dir_freq"] = "0.4";
    v["synth_adv_freq"] = "0.3";
    v["synth_min_filler"] = "3";
    v["synth_max_filler"] = "8";
    v["synth_lemmas"] = "8";
    v["synth_two_sense"] = "6";
    return c;
}

void Config::set(const std::string& key, const std::string& value) {
    auto it = values_.find(key);
    require(it != values_.end(), "unknown configuration key: ", key);
    it->second = value;
}

void Config::set_kv(const std::string& assignment) {
    std::size_t eq = assignment.find('=');
    require(eq != std::string::npos, "expected key=value, got '", assignment, "'");
    set(assignment.substr(0, eq), assignment.substr(eq + 1));
}

void Config::load_file(const std::string& path) {
    std::ifstream in(path);
    require(in.good(), "cannot open config file: ", path);
    std::string line;
    long line_no = 0;
    while (std::getline(in, line)) {
        ++line_no;
        if (!line.empty() && line.back() == '\r') line.pop_back();
        std::size_t start = line.find_first_not_of(" \t");
        if (start == std::string::npos || line[start] == '#') continue;
        std::size_t eq = line.find('=', start);
        if (eq == std::string::npos)
            throw ParseError(strcat_msg("expected key=value, got '", line, "'"), line_no);
        std::string key = line.substr(start, eq - start);
        while (!key.empty() && (key.back() == ' ' || key.back() == '\t')) key.pop_back();
        std::string value = line.substr(eq + 1);
        std::size_t vs = value.find_first_not_of(" \t");
        value = vs == std::string::npos ? "" : value.substr(vs);
        try {
            set(key, value);
        } catch (const Error& e) {
            throw ParseError(e.what(), line_no);
        }
    }
}

const std::string& Config::gets(const std::string& key) const {
    auto it = values_.find(key);
    require(it != values_.end(), "unknown configuration key: ", key);
    return it->second;
}

int Config::geti(const std::string& key) const {
    long v = getl(key);
    return static_cast<int>(v);
}

long Config::getl(const std::string& key) const {
    const std::string& s = gets(key);
    char* end = nullptr;
    long v = std::strtol(s.c_str(), &end, 10);
    require(end && *end == '\0' && !s.empty(), "config key ", key,
            " needs an integer, got '", s, "'");
    return v;
}

double Config::getf(const std::string& key) const {
    const std::string& s = gets(key);
    char* end = nullptr;
    double v = std::strtof(s.c_str(), &end);
    require(end && *end == '\0' && !s.empty(), "config key ", key, " needs a number, got '", s,
            "'");
    return v;
}

bool Config::getb(const std::string& key) const {
    const std::string& s = gets(key);
    if (s == "true" || s == "1" || s == "yes") return true;
    if (s == "false" || s == "0" || s == "no") return false;
    fail(strcat_msg("config key ", key, " needs a boolean, got '", s, "'"));
}

std::string Config::serialize() const {
    std::ostringstream out;
    for (const auto& [k, v] : values_) out << k << "=" << v << "\n";
    return out.str();
}

}  // namespace srl
