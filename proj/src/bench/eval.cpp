#include "common.hpp"

#include "fogkit/errors.hpp"
#include "fogkit/metrics/metrics.hpp"

#include <set>

namespace fogkit::detail {
namespace {

std::vector<std::pair<std::string, fs::path>> parse_methods(const RunConfig& config) {
    std::vector<std::pair<std::string, fs::path>> out;
    std::set<std::string> names;
    for (const auto& item : config.get_list("restored")) {
        const auto eq = item.find('=');
        if (eq == std::string::npos || eq == 0 || eq + 1 == item.size())
            throw ConfigError("restored entries must be name=path, got '" + item + "'");
        std::string name = item.substr(0, eq);
        if (!names.insert(name).second) throw ConfigError("method '" + name + "' listed twice");
        out.emplace_back(std::move(name), item.substr(eq + 1));
    }
    if (out.empty()) throw ConfigError("config key 'restored' is required");
    return out;
}

}  // namespace

std::vector<ConfigKey> eval_keys() {
    return {
        {"reference", "", "dataset root holding the clear/light_<L>/ ground truth"},
        {"restored", "", "comma-separated name=root entries, one per method"},
        {"output", "", "directory for report.json and report.csv"},
        {"size", "224", "frames are resized to size x size before scoring, 0 keeps them"},
        {"seed", "0", "random seed"},
    };
}

int cmd_eval(const RunConfig& config, std::ostream& log) {
    const fs::path reference = config.get_path("reference");
    const fs::path out = config.get_path("output");
    const auto methods = parse_methods(config);
    const long size = config.get_int("size");
    if (size < 0) throw ConfigError("size must be >= 0");
    require_dir(reference, "reference");
    for (const auto& [name, root] : methods) require_dir(root, "restored (" + name + ")");

    const DatasetIndex ref = scan_strict(reference);
    std::vector<EvalItem> items;
    std::vector<std::string> errors;
    for (const auto& [name, root] : methods) {
        const DatasetIndex restored = scan_dataset(root);
        for (const auto& e : restored.errors) errors.push_back(name + ": " + e.message);
        if (restored.foggy.empty()) errors.push_back(name + ": no restored sequences under " + root.string());
        for (const auto& seq : restored.foggy) {
            EvalItem item;
            item.method = name;
            item.lighting = seq.frames.front().tag.lighting;
            item.density = seq.frames.front().tag.density;
            item.restored = frames_of(seq);
            if (const FrameSequence* gt = find_clear(ref, item.lighting)) {
                if (positions_of(*gt) == positions_of(seq)) {
                    item.reference = frames_of(*gt);
                } else {
                    errors.push_back(name + " density " + std::string(density_label(item.density)) + " lighting " +
                                     std::to_string(item.lighting) + ": positions differ from ground truth");
                    continue;
                }
            }
            items.push_back(std::move(item));
        }
    }

    MetricsReport report = evaluate(items, {.size = size});
    report.errors.insert(report.errors.begin(), errors.begin(), errors.end());
    for (const auto& [key, value] : config.values()) report.config[key] = value;
    make_dirs(out);
    write_text(out / "report.json", to_json(report));
    write_text(out / "report.csv", to_csv(report));

    log << to_csv(report);
    for (const auto& e : report.errors) log << "eval: error: " << e << "\n";
    return report.errors.empty() ? kExitOk : kExitData;
}

}  // namespace fogkit::detail
