#include "common.hpp"

#include "fogkit/data/transform.hpp"
#include "fogkit/dcp/dcp.hpp"
#include "fogkit/errors.hpp"
#include "fogkit/image/png_io.hpp"
#include "fogkit/net/train.hpp"

namespace fogkit::detail {
namespace {

DcpParams dcp_params(const RunConfig& config) {
    DcpParams p;
    p.omega = config.get_double("omega");
    p.patch = config.get_int("patch");
    p.t0 = config.get_double("t0");
    p.top_fraction = config.get_double("top_fraction");
    p.guided_radius = config.get_int("guided_radius");
    p.guided_eps = config.get_double("guided_eps");
    p.airlight_floor = config.get_double("airlight_floor");
    validate(p);
    return p;
}

std::vector<Frame> run_tcvd(const net::TcvdModel& model, const std::vector<Frame>& frames) {
    const Eigen::Index size = model.config().input_size;
    std::vector<Frame> resized;
    for (const auto& f : frames) resized.push_back(resize(f, size));
    std::vector<Frame> restored = net::infer_video(model, resized);
    for (std::size_t i = 0; i < restored.size(); ++i)
        restored[i] = resize(restored[i], frames[i].height(), frames[i].width());
    return restored;
}

}  // namespace

std::vector<ConfigKey> defog_keys() {
    const DcpParams d;
    return {
        {"input", "", "dataset root with foggy/light_<L>/density_<D>/"},
        {"output", "", "output root; restored frames mirror the input names"},
        {"method", "dcp", "dcp | tcvd | identity"},
        {"checkpoint", "", "trained model file (tcvd)"},
        {"omega", "0.95", "dcp haze retention"},
        {"patch", std::to_string(d.patch), "dcp dark-channel patch"},
        {"t0", "0.1", "dcp transmission floor"},
        {"top_fraction", "0.001", "dcp airlight candidate fraction"},
        {"guided_radius", std::to_string(d.guided_radius), "dcp guided-filter radius"},
        {"guided_eps", "0.001", "dcp guided-filter regularizer"},
        {"airlight_floor", "0.05", "dcp airlight channel floor"},
        {"seed", "0", "random seed"},
    };
}

int cmd_defog(const RunConfig& config, std::ostream& log) {
    const std::string method = config.get("method");
    if (method != "dcp" && method != "tcvd" && method != "identity")
        throw ConfigError("unknown method '" + method + "' (expected dcp, tcvd or identity)");
    const fs::path input = config.get_path("input");
    const fs::path out = config.get_path("output");
    require_dir(input, "input");

    ordered_json params = ordered_json::object();
    DcpParams dcp;
    std::optional<net::TcvdModel> model;
    if (method == "dcp") {
        dcp = dcp_params(config);
        params = {{"omega", dcp.omega},         {"patch", dcp.patch},
                  {"t0", dcp.t0},               {"top_fraction", dcp.top_fraction},
                  {"guided_radius", dcp.guided_radius}, {"guided_eps", dcp.guided_eps},
                  {"airlight_floor", dcp.airlight_floor}};
    } else if (method == "tcvd") {
        if (!config.has("checkpoint")) throw ConfigError("method tcvd needs a checkpoint");
        const fs::path ckpt = config.get_path("checkpoint");
        if (!fs::is_regular_file(ckpt)) throw DataError("checkpoint not found: " + ckpt.string());
        model = net::load_checkpoint(ckpt);
        params = {{"checkpoint", ckpt.string()}, {"model", model->config().echo()}};
    }

    const DatasetIndex index = scan_strict(input);
    if (index.foggy.empty()) throw DataError(input.string() + ": no foggy sequences found");
    make_dirs(out);

    ordered_json manifest_files = ordered_json::object();
    std::size_t frames_written = 0;
    for (const auto& seq : index.foggy) {
        const std::vector<Frame> frames = frames_of(seq);
        std::vector<Frame> restored;
        if (method == "dcp")
            restored = dcp_defog_video(frames, dcp);
        else if (method == "tcvd")
            restored = run_tcvd(*model, frames);
        else
            restored = frames;
        for (std::size_t i = 0; i < restored.size(); ++i) {
            const fs::path rel = fs::relative(seq.frames[i].source, input);
            make_dirs((out / rel).parent_path());
            write_png(out / rel, restored[i]);
            const AcquisitionTag& tag = seq.frames[i].tag;
            manifest_files[rel.generic_string()] = {{"position", tag.position},
                                                    {"lighting", tag.lighting},
                                                    {"density", std::string(density_label(tag.density))}};
            ++frames_written;
        }
    }

    ordered_json manifest;
    manifest["files"] = manifest_files;
    write_text(out / "manifest.json", manifest.dump(2) + "\n");
    ordered_json sidecar;
    sidecar["method"] = method;
    sidecar["params"] = params;
    sidecar["config"] = echo(config);
    sidecar["sequences"] = index.foggy.size();
    sidecar["frames"] = frames_written;
    write_text(out / "defog.json", sidecar.dump(2) + "\n");
    log << "defog: " << method << " restored " << frames_written << " frames in " << index.foggy.size()
        << " sequences to " << out.string() << "\n";
    return kExitOk;
}

}  // namespace fogkit::detail
