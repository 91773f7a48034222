#include "common.hpp"

#include "fogkit/errors.hpp"
#include "fogkit/image/png_io.hpp"

#include <algorithm>

namespace fogkit::detail {

std::vector<ConfigKey> recompose_keys() {
    return {
        {"input", "", "directory of pos_<N>_light_<L>_density_<D>.png slices"},
        {"output", "", "output dataset root"},
        {"depth", "", "optional directory of pos_<N>.png depth maps to copy"},
    };
}

int cmd_recompose(const RunConfig& config, std::ostream& log) {
    const fs::path input = config.get_path("input");
    const fs::path out = config.get_path("output");
    require_dir(input, "input");
    std::optional<fs::path> depth_dir;
    if (config.has("depth")) {
        depth_dir = config.get_path("depth");
        require_dir(*depth_dir, "depth");
    }

    std::vector<fs::path> files;
    std::size_t ignored = 0;
    for (const auto& entry : fs::directory_iterator(input)) {
        if (!entry.is_regular_file()) continue;
        if (parse_raw_slice_name(entry.path().filename().string()))
            files.push_back(entry.path());
        else
            ++ignored;
    }
    std::sort(files.begin(), files.end());
    if (files.empty()) throw DataError(input.string() + ": no stop-motion slices found");

    std::vector<TaggedFrame> slices;
    for (const auto& path : files) {
        const AcquisitionTag tag = *parse_raw_slice_name(path.filename().string());
        validate_tag(tag);
        slices.push_back({read_png(path), tag, path});
    }
    const RecomposeResult result = recompose(std::move(slices));

    make_dirs(out);
    ordered_json manifest_files = ordered_json::object();
    std::size_t foggy = 0, clear = 0;
    for (const auto& [key, video] : result.videos) {
        const fs::path dir = condition_dir(key.first, key.second);
        make_dirs(out / dir);
        for (std::size_t i = 0; i < video.size(); ++i) {
            const fs::path rel = dir / frame_file_name(i);
            write_png(out / rel, video[i]);
            const AcquisitionTag& tag = video.frames[i].tag;
            manifest_files[rel.generic_string()] = {{"position", tag.position},
                                                    {"lighting", tag.lighting},
                                                    {"density", std::string(density_label(tag.density))}};
        }
        (key.second == Density::clear ? clear : foggy) += 1;
    }
    if (depth_dir) {
        make_dirs(out / "depth");
        for (const auto& entry : fs::directory_iterator(*depth_dir)) {
            const std::string name = entry.path().filename().string();
            if (entry.is_regular_file() && name.starts_with("pos_") && name.ends_with(".png"))
                fs::copy_file(entry.path(), out / "depth" / name, fs::copy_options::overwrite_existing);
        }
    }

    ordered_json manifest;
    manifest["config"] = echo(config);
    manifest["foggy_videos"] = foggy;
    manifest["clear_videos"] = clear;
    manifest["warnings"] = result.warnings;
    manifest["files"] = manifest_files;
    write_text(out / "manifest.json", manifest.dump(2) + "\n");

    for (const auto& w : result.warnings) log << "recompose: warning: " << w << "\n";
    if (ignored > 0) log << "recompose: ignored " << ignored << " file(s) not named like a slice\n";
    log << "recompose: " << foggy << " foggy videos, " << clear << " clear videos from " << files.size()
        << " slices\n";
    return kExitOk;
}

}  // namespace fogkit::detail
