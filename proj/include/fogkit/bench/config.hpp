#pragma once

#include <filesystem>
#include <map>
#include <string>
#include <string_view>
#include <vector>

namespace fogkit {

struct ConfigKey {
    std::string name;
    std::string default_value;  ///< empty means "unset"
    std::string help;
};

/// Command settings from a key=value file plus overrides. Only keys in the
/// schema are accepted; `seed` is always part of it.
class RunConfig {
public:
    explicit RunConfig(std::vector<ConfigKey> schema);

    /// One `key = value` per line; `#` starts a comment. Throws ConfigError
    /// naming the file and line for malformed lines and unknown keys.
    void load_file(const std::filesystem::path& path);
    /// Parses "key=value".
    void set(std::string_view assignment);
    void set(const std::string& key, std::string value);

    bool has(const std::string& key) const;  ///< set to a non-empty value
    const std::string& get(const std::string& key) const;
    /// Throws ConfigError if the key is unset.
    const std::string& require(const std::string& key) const;
    double get_double(const std::string& key) const;
    long get_int(const std::string& key) const;
    bool get_bool(const std::string& key) const;
    std::vector<std::string> get_list(const std::string& key) const;  ///< comma separated
    std::vector<double> get_doubles(const std::string& key) const;
    std::vector<long> get_ints(const std::string& key) const;
    std::filesystem::path get_path(const std::string& key) const;

    /// Effective value of every key, including defaults.
    const std::map<std::string, std::string>& values() const { return values_; }
    const std::vector<ConfigKey>& schema() const { return schema_; }
    /// One line per key: name, default and description.
    std::string describe() const;

private:
    std::vector<ConfigKey> schema_;
    std::map<std::string, std::string> values_;
};

}  // namespace fogkit
