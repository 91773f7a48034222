#include "fogkit/bench/config.hpp"

#include "fogkit/errors.hpp"

#include <algorithm>
#include <charconv>
#include <fstream>
#include <sstream>

namespace fogkit {
namespace {

std::string_view trim(std::string_view s) {
    const auto first = s.find_first_not_of(" \t\r");
    if (first == std::string_view::npos) return {};
    const auto last = s.find_last_not_of(" \t\r");
    return s.substr(first, last - first + 1);
}

template <class T>
T parse_number(const std::string& key, std::string_view text) {
    T value{};
    const auto* end = text.data() + text.size();
    const auto [ptr, ec] = std::from_chars(text.data(), end, value);
    if (ec != std::errc{} || ptr != end || text.empty())
        throw ConfigError("config key '" + key + "': '" + std::string(text) + "' is not a valid number");
    return value;
}

}  // namespace

RunConfig::RunConfig(std::vector<ConfigKey> schema) : schema_(std::move(schema)) {
    if (std::none_of(schema_.begin(), schema_.end(), [](const ConfigKey& k) { return k.name == "seed"; }))
        schema_.push_back({"seed", "0", "random seed"});
    for (const auto& k : schema_) values_[k.name] = k.default_value;
}

void RunConfig::load_file(const std::filesystem::path& path) {
    std::ifstream in(path);
    if (!in) throw ConfigError("cannot read config file " + path.string());
    std::string line;
    for (int number = 1; std::getline(in, line); ++number) {
        std::string_view text = line;
        if (const auto hash = text.find('#'); hash != std::string_view::npos) text = text.substr(0, hash);
        text = trim(text);
        if (text.empty()) continue;
        try {
            set(text);
        } catch (const ConfigError& e) {
            throw ConfigError(path.string() + ":" + std::to_string(number) + ": " + e.what());
        }
    }
}

void RunConfig::set(std::string_view assignment) {
    const auto eq = assignment.find('=');
    if (eq == std::string_view::npos) throw ConfigError("expected key=value, got '" + std::string(assignment) + "'");
    set(std::string(trim(assignment.substr(0, eq))), std::string(trim(assignment.substr(eq + 1))));
}

void RunConfig::set(const std::string& key, std::string value) {
    auto it = values_.find(key);
    if (it == values_.end()) throw ConfigError("unknown config key '" + key + "'");
    it->second = std::move(value);
}

bool RunConfig::has(const std::string& key) const { return !get(key).empty(); }

const std::string& RunConfig::get(const std::string& key) const {
    auto it = values_.find(key);
    if (it == values_.end()) throw ConfigError("unknown config key '" + key + "'");
    return it->second;
}

const std::string& RunConfig::require(const std::string& key) const {
    const std::string& v = get(key);
    if (v.empty()) throw ConfigError("config key '" + key + "' is required");
    return v;
}

double RunConfig::get_double(const std::string& key) const { return parse_number<double>(key, require(key)); }

long RunConfig::get_int(const std::string& key) const { return parse_number<long>(key, require(key)); }

bool RunConfig::get_bool(const std::string& key) const {
    const std::string& v = require(key);
    if (v == "true" || v == "1" || v == "yes") return true;
    if (v == "false" || v == "0" || v == "no") return false;
    throw ConfigError("config key '" + key + "': '" + v + "' is not a boolean");
}

std::vector<std::string> RunConfig::get_list(const std::string& key) const {
    std::vector<std::string> out;
    std::stringstream ss(get(key));
    for (std::string item; std::getline(ss, item, ',');)
        if (auto t = trim(item); !t.empty()) out.emplace_back(t);
    return out;
}

std::vector<double> RunConfig::get_doubles(const std::string& key) const {
    std::vector<double> out;
    for (const auto& s : get_list(key)) out.push_back(parse_number<double>(key, s));
    return out;
}

std::vector<long> RunConfig::get_ints(const std::string& key) const {
    std::vector<long> out;
    for (const auto& s : get_list(key)) out.push_back(parse_number<long>(key, s));
    return out;
}

std::filesystem::path RunConfig::get_path(const std::string& key) const { return require(key); }

std::string RunConfig::describe() const {
    auto shown = [](const ConfigKey& k) {
        return "[" + (k.default_value.empty() ? std::string("unset") : k.default_value) + "]";
    };
    std::size_t name_width = 0, default_width = 0;
    for (const auto& k : schema_) {
        name_width = std::max(name_width, k.name.size());
        default_width = std::max(default_width, shown(k).size());
    }
    std::string out;
    for (const auto& k : schema_) {
        const std::string d = shown(k);
        out += "  " + k.name + std::string(name_width - k.name.size() + 2, ' ') + d +
               std::string(default_width - d.size() + 2, ' ') + k.help + "\n";
    }
    return out;
}

}  // namespace fogkit
