#include "common.hpp"

#include "fogkit/errors.hpp"

#include <cstdio>
#include <fstream>
#include <regex>

namespace fogkit {
namespace detail {

ordered_json echo(const RunConfig& config) {
    ordered_json j = ordered_json::object();
    for (const auto& [key, value] : config.values()) j[key] = value;
    return j;
}

void write_text(const fs::path& path, std::string_view text) {
    std::ofstream out(path, std::ios::binary);
    out.write(text.data(), static_cast<std::streamsize>(text.size()));
    if (!out) throw DataError("cannot write " + path.string());
}

void make_dirs(const fs::path& dir) {
    std::error_code ec;
    fs::create_directories(dir, ec);
    if (ec || !fs::is_directory(dir)) throw DataError("cannot create directory " + dir.string() + ": " + ec.message());
}

void require_dir(const fs::path& dir, const std::string& key) {
    if (!fs::is_directory(dir)) throw DataError(key + ": directory not found: " + dir.string());
}

DatasetIndex scan_strict(const fs::path& root) {
    DatasetIndex index = scan_dataset(root);
    if (!index.errors.empty()) {
        std::string msg = root.string() + ": " + std::to_string(index.errors.size()) + " unreadable file(s)";
        for (const auto& e : index.errors) msg += "\n  " + e.message;
        throw DataError(msg);
    }
    return index;
}

std::vector<Frame> frames_of(const FrameSequence& seq) {
    std::vector<Frame> out;
    out.reserve(seq.size());
    for (const auto& f : seq.frames) out.push_back(f.frame);
    return out;
}

std::vector<int> positions_of(const FrameSequence& seq) {
    std::vector<int> out;
    for (const auto& f : seq.frames) out.push_back(f.tag.position);
    return out;
}

fs::path condition_dir(int lighting, Density density) {
    const fs::path light = "light_" + std::to_string(lighting);
    if (density == Density::clear) return fs::path("clear") / light;
    return fs::path("foggy") / light / ("density_" + std::string(density_label(density)));
}

}  // namespace detail

const std::vector<Command>& commands() {
    static const std::vector<Command> all{
        {"synth", "write a synthetic foggy/clear dataset at the contrast anchors", detail::synth_keys(),
         detail::cmd_synth},
        {"recompose", "regroup stop-motion slices into one video per condition", detail::recompose_keys(),
         detail::cmd_recompose},
        {"defog", "restore every foggy sequence of a dataset", detail::defog_keys(), detail::cmd_defog},
        {"train", "train the temporal network on one or more dataset roots", detail::train_keys(),
         detail::cmd_train},
        {"eval", "score restored trees against ground truth (JSON + CSV)", detail::eval_keys(), detail::cmd_eval},
    };
    return all;
}

const Command& find_command(std::string_view name) {
    for (const auto& c : commands())
        if (c.name == name) return c;
    throw ConfigError("unknown command '" + std::string(name) + "'");
}

int exit_code(const std::exception& error) {
    if (dynamic_cast<const NumericalError*>(&error)) return kExitNumerical;
    if (dynamic_cast<const ConfigError*>(&error) || dynamic_cast<const ContractError*>(&error) ||
        dynamic_cast<const ShapeError*>(&error) || dynamic_cast<const InfeasibleTarget*>(&error))
        return kExitConfig;
    if (dynamic_cast<const DataError*>(&error) || dynamic_cast<const std::filesystem::filesystem_error*>(&error))
        return kExitData;
    return 1;
}

int run_command(const Command& command, const RunConfig& config, std::ostream& log, std::ostream& err) {
    try {
        return command.run(config, log);
    } catch (const std::exception& e) {
        err << command.name << ": error: " << e.what() << "\n";
        return exit_code(e);
    }
}

std::string raw_slice_name(const AcquisitionTag& tag) {
    char buf[64];
    std::snprintf(buf, sizeof buf, "pos_%04d_light_%d_density_", tag.position, tag.lighting);
    return buf + std::string(density_label(tag.density)) + ".png";
}

std::optional<AcquisitionTag> parse_raw_slice_name(std::string_view name) {
    static const std::regex pattern(R"(pos_(\d+)_light_(\d+)_density_([0-9.]+|none)\.png)");
    std::match_results<std::string_view::const_iterator> m;
    if (!std::regex_match(name.begin(), name.end(), m, pattern)) return std::nullopt;
    AcquisitionTag tag;
    try {
        tag.position = std::stoi(m[1].str());
        tag.lighting = std::stoi(m[2].str());
        tag.density = parse_density(m[3].str());
    } catch (const std::exception&) {
        return std::nullopt;
    }
    return tag;
}

std::string frame_file_name(std::size_t index) {
    char buf[32];
    std::snprintf(buf, sizeof buf, "frame_%04zu.png", index);
    return buf;
}

std::string depth_file_name(int position) {
    char buf[32];
    std::snprintf(buf, sizeof buf, "pos_%04d.png", position);
    return buf;
}

}  // namespace fogkit
