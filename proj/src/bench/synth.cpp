#include "common.hpp"

#include "fogkit/bench/scene.hpp"
#include "fogkit/errors.hpp"
#include "fogkit/fog/fog_model.hpp"
#include "fogkit/image/png_io.hpp"

#include <algorithm>
#include <map>

namespace fogkit::detail {
namespace {

struct ClearSource {
    std::map<int, std::vector<TaggedFrame>> by_lighting;  ///< ordered by position
    std::map<int, DepthMap> depth;
    PanelROI panel;
};

Rect parse_rect(const RunConfig& config, const std::string& key) {
    const auto v = config.get_ints(key);
    if (v.size() != 4) throw ConfigError(key + " must be four integers y,x,height,width");
    return {v[0], v[1], v[2], v[3]};
}

ClearSource procedural_source(const RunConfig& config) {
    SceneOptions options;
    options.size = config.get_int("size");
    options.positions = static_cast<int>(config.get_int("positions"));
    options.seed = static_cast<std::uint64_t>(config.get_int("seed"));
    const long lightings = config.get_int("lightings");
    if (lightings < 1 || lightings > kLightingConditions)
        throw ConfigError("lightings must be in [1, " + std::to_string(kLightingConditions) + "]");

    const ProceduralScene scene(options);
    ClearSource src;
    src.panel = scene.panel();
    for (int p = 0; p < options.positions; ++p) src.depth.emplace(p, scene.depth(p));
    for (int l = 0; l < lightings; ++l)
        for (int p = 0; p < options.positions; ++p)
            src.by_lighting[l].push_back({scene.clear(p, l), {p, l, Density::clear}});
    return src;
}

ClearSource dataset_source(const RunConfig& config) {
    const fs::path input = config.get_path("input");
    require_dir(input, "input");
    if (!config.has("panel_black") || !config.has("panel_white"))
        throw ConfigError("the dataset source needs panel_black and panel_white");
    ClearSource src;
    src.panel = {parse_rect(config, "panel_black"), parse_rect(config, "panel_white")};
    const DatasetIndex index = scan_strict(input);
    if (index.clear.empty()) throw DataError(input.string() + ": no clear sequences found");
    for (const auto& seq : index.clear) {
        for (const auto& f : seq.frames) {
            auto it = index.depth.find(f.tag.position);
            if (it == index.depth.end())
                throw DataError(input.string() + ": no depth map for position " + std::to_string(f.tag.position));
            src.depth.emplace(f.tag.position, *it->second);
            src.by_lighting[f.tag.lighting].push_back({f.frame, f.tag});
        }
    }
    return src;
}

double panel_depth(const DepthMap& depth, const PanelROI& roi) {
    double lo = 0.0, hi = 0.0;
    bool first = true;
    for (const Rect& r : {roi.black, roi.white}) {
        const auto block = depth.depth.block(r.y, r.x, r.height, r.width);
        if (!depth.valid.block(r.y, r.x, r.height, r.width).all())
            throw DataError("panel area has invalid depth pixels");
        lo = first ? block.minCoeff() : std::min(lo, block.minCoeff());
        hi = first ? block.maxCoeff() : std::max(hi, block.maxCoeff());
        first = false;
    }
    if (hi - lo > 1e-9) throw DataError("panel depth is not constant over the panel area");
    return lo;
}

Frame quantized(Frame f) {
    for (auto& c : f.channels) c = c.unaryExpr([](double v) { return quantize8(v); });
    return f;
}

}  // namespace

std::vector<ConfigKey> synth_keys() {
    return {
        {"output", "", "output dataset root"},
        {"source", "procedural", "procedural | dataset"},
        {"input", "", "clear dataset root with clear/light_<L>/ and depth/ (dataset source)"},
        {"size", "128", "frame side in pixels (procedural source)"},
        {"positions", "12", "robot positions per video (procedural source)"},
        {"lightings", "1", "lighting conditions 1..6 (procedural source)"},
        {"densities", "0.015,0.05,0.15", "panel-contrast anchors to synthesize"},
        {"airlight", "auto", "auto (panel mean luminance) or r,g,b"},
        {"beta", "", "fixed extinction in 1/cm instead of calibration (one density only)"},
        {"panel_black", "", "black patch y,x,height,width (dataset source)"},
        {"panel_white", "", "white patch y,x,height,width (dataset source)"},
        {"raw", "true", "also write tagged stop-motion slices under raw/"},
        {"seed", "0", "random seed"},
    };
}

int cmd_synth(const RunConfig& config, std::ostream& log) {
    const fs::path out = config.get_path("output");
    const std::string source = config.get("source");
    if (source != "procedural" && source != "dataset")
        throw ConfigError("source must be 'procedural' or 'dataset', got '" + source + "'");
    std::vector<Density> densities;
    for (const auto& label : config.get_list("densities")) {
        const Density d = parse_density(label);
        if (d == Density::clear) throw ConfigError("densities must be fog anchors, got 'none'");
        densities.push_back(d);
    }
    if (densities.empty()) throw ConfigError("densities is empty");
    std::optional<double> fixed_beta;
    if (config.has("beta")) {
        fixed_beta = config.get_double("beta");
        if (densities.size() != 1) throw ConfigError("a fixed beta needs exactly one density");
    }
    std::optional<Rgb> fixed_airlight;
    if (config.get("airlight") != "auto") {
        const auto a = config.get_doubles("airlight");
        if (a.size() != 3) throw ConfigError("airlight must be 'auto' or three numbers");
        fixed_airlight = Rgb(a[0], a[1], a[2]);
    }
    const bool raw = config.get_bool("raw");

    const ClearSource src = source == "procedural" ? procedural_source(config) : dataset_source(config);
    const Frame& any = src.by_lighting.begin()->second.front().frame;
    validate(src.panel, any.height(), any.width());
    make_dirs(out);

    ordered_json files = ordered_json::object();
    ordered_json contrasts = ordered_json::object();
    auto write_frame = [&](const fs::path& rel, const Frame& frame, const AcquisitionTag& tag) {
        write_png(out / rel, frame);
        files[rel.generic_string()] = {{"position", tag.position},
                                       {"lighting", tag.lighting},
                                       {"density", std::string(density_label(tag.density))}};
    };
    if (raw) make_dirs(out / "raw");
    make_dirs(out / "depth");
    for (const auto& [position, depth] : src.depth) write_depth_png(out / "depth" / depth_file_name(position), depth);

    std::size_t foggy_videos = 0;
    for (const auto& [lighting, frames] : src.by_lighting) {
        const fs::path clear_dir = condition_dir(lighting, Density::clear);
        make_dirs(out / clear_dir);
        for (std::size_t i = 0; i < frames.size(); ++i) {
            write_frame(clear_dir / frame_file_name(i), frames[i].frame, frames[i].tag);
            if (raw) write_png(out / "raw" / raw_slice_name(frames[i].tag), frames[i].frame);
        }
        for (Density density : densities) {
            const fs::path dir = condition_dir(lighting, density);
            make_dirs(out / dir);
            double lo = 1.0, hi = 0.0;
            for (std::size_t i = 0; i < frames.size(); ++i) {
                const Frame& clear = frames[i].frame;
                const DepthMap& depth = src.depth.at(frames[i].tag.position);
                const Rgb airlight = fixed_airlight ? *fixed_airlight : panel_airlight(clear, src.panel);
                const double beta =
                    fixed_beta ? *fixed_beta
                               : beta_for_contrast(panel_depth(depth, src.panel), panel_contrast(clear, src.panel),
                                                   density_anchor(density));
                const Frame foggy = apply_fog(clear, depth, {beta, airlight});
                const double measured = panel_contrast(quantized(foggy), src.panel);
                lo = std::min(lo, measured);
                hi = std::max(hi, measured);
                AcquisitionTag tag = frames[i].tag;
                tag.density = density;
                write_frame(dir / frame_file_name(i), foggy, tag);
                files[(dir / frame_file_name(i)).generic_string()]["beta"] = beta;
                if (raw) write_png(out / "raw" / raw_slice_name(tag), foggy);
            }
            contrasts[dir.generic_string()] = {
                {"target", density_anchor(density)}, {"min", lo}, {"max", hi}};
            ++foggy_videos;
        }
    }

    ordered_json manifest;
    manifest["config"] = echo(config);
    manifest["panel"] = {{"black", {src.panel.black.y, src.panel.black.x, src.panel.black.height, src.panel.black.width}},
                         {"white", {src.panel.white.y, src.panel.white.x, src.panel.white.height, src.panel.white.width}}};
    manifest["contrasts"] = contrasts;
    manifest["files"] = files;
    write_text(out / "manifest.json", manifest.dump(2) + "\n");
    log << "synth: " << foggy_videos << " foggy and " << src.by_lighting.size() << " clear videos of "
        << src.by_lighting.begin()->second.size() << " frames in " << out.string() << "\n";
    return kExitOk;
}

}  // namespace fogkit::detail
