#pragma once

#include <map>
#include <string>

namespace srl {

// Flat key=value run configuration with a fixed key registry. Unknown keys
// are rejected so typos in config files or --set overrides fail fast.
class Config {
public:
    static Config defaults();

    void set(const std::string& key, const std::string& value);
    void set_kv(const std::string& assignment);  // "key=value"
    void load_file(const std::string& path);

    bool has(const std::string& key) const { return values_.count(key) > 0; }
    const std::string& gets(const std::string& key) const;
    int geti(const std::string& key) const;
    long getl(const std::string& key) const;
    double getf(const std::string& key) const;
    bool getb(const std::string& key) const;

    std::string serialize() const;  // sorted key=value lines

private:
    std::map<std::string, std::string> values_;
};

}  // namespace srl
