#include "common.hpp"

#include "fogkit/data/transform.hpp"
#include "fogkit/errors.hpp"
#include "fogkit/net/train.hpp"

#include <cstdio>

namespace fogkit::detail {
namespace {

net::TcvdConfig model_config(const RunConfig& config) {
    net::TcvdConfig c;
    c.input_size = config.get_int("input_size");
    c.encoder_filters.clear();
    for (long f : config.get_ints("encoder_filters")) c.encoder_filters.push_back(f);
    if (c.encoder_filters.empty()) throw ConfigError("encoder_filters is empty");
    c.tpformer_stages = static_cast<net::Index>(c.encoder_filters.size()) - 1;
    c.heads = config.get_int("heads");
    c.loss_a = config.get_double("loss_a");
    c.loss_b = config.get_double("loss_b");
    c.validate();
    return c;
}

// Every (foggy triplet, clear center) pair of a dataset root, resized to the
// model input.
std::vector<net::TrainingSample> root_samples(const fs::path& root, std::size_t root_index, Eigen::Index size,
                                              long limit) {
    const DatasetIndex index = scan_strict(root);
    std::vector<net::TrainingSample> out;
    for (const auto& seq : index.foggy) {
        const int lighting = seq.frames.front().tag.lighting;
        const FrameSequence* clear = find_clear(index, lighting);
        if (!clear) throw DataError(root.string() + ": no clear sequence for lighting " + std::to_string(lighting));
        if (positions_of(*clear) != positions_of(seq))
            throw DataError(root.string() + ": foggy and clear positions differ for lighting " +
                            std::to_string(lighting) + ", density " + std::string(density_label(seq.frames.front().tag.density)));
        for (const auto& [p, c, n] : triplet_indices(seq.size())) {
            if (limit > 0 && static_cast<long>(out.size()) >= limit) return out;
            out.push_back({{resize(seq[p], size), resize(seq[c], size), resize(seq[n], size)},
                           resize((*clear)[c], size),
                           root_index});
        }
    }
    return out;
}

std::string loss_csv(const net::TrainLog& log) {
    std::string out = "step,loss\n";
    char buf[64];
    for (const auto& [step, loss] : log.losses) {
        std::snprintf(buf, sizeof buf, "%d,%.17g\n", step, loss);
        out += buf;
    }
    return out;
}

}  // namespace

std::vector<ConfigKey> train_keys() {
    const net::TcvdConfig d = net::TcvdConfig::desk();
    return {
        {"roots", "", "comma-separated dataset roots"},
        {"output", "", "directory for checkpoint.bin, loss.csv and train.json"},
        {"steps", "500", "optimizer steps"},
        {"learning_rate", "0.0001", "ADAM step size"},
        {"batch", "1", "samples per step"},
        {"augment", "true", "random flips and quarter turns"},
        {"max_samples", "0", "samples taken per root, 0 for all"},
        {"input_size", std::to_string(d.input_size), "model input side"},
        {"encoder_filters", "8,16,32,64", "channels per encoder stage"},
        {"heads", std::to_string(d.heads), "attention heads"},
        {"loss_a", "1", "weight of 1 - SSIM"},
        {"loss_b", "1", "weight of the L1 term"},
        {"seed", "0", "random seed"},
    };
}

int cmd_train(const RunConfig& config, std::ostream& log) {
    const std::vector<std::string> roots = config.get_list("roots");
    if (roots.empty()) throw ConfigError("config key 'roots' is required");
    for (const auto& r : roots) require_dir(r, "roots");
    const fs::path out = config.get_path("output");
    const net::TcvdConfig model_cfg = model_config(config);
    net::TrainOptions options;
    options.steps = static_cast<int>(config.get_int("steps"));
    options.learning_rate = config.get_double("learning_rate");
    options.batch = config.get_int("batch");
    options.augment = config.get_bool("augment");
    options.seed = static_cast<std::uint64_t>(config.get_int("seed"));
    const long limit = config.get_int("max_samples");
    if (options.steps < 0) throw ConfigError("steps must be >= 0");
    if (options.batch < 1) throw ConfigError("batch must be >= 1");

    std::vector<net::TrainingSample> samples;
    std::vector<std::size_t> per_root;
    for (std::size_t i = 0; i < roots.size(); ++i) {
        auto s = root_samples(roots[i], i, model_cfg.input_size, limit);
        if (s.empty()) throw DataError(roots[i] + ": no (foggy, clear) training pairs");
        per_root.push_back(s.size());
        std::move(s.begin(), s.end(), std::back_inserter(samples));
    }
    make_dirs(out);

    net::TcvdModel model(model_cfg, options.seed);
    net::TrainLog progress;
    options.on_step = [&](int step, double loss) {
        progress.losses.emplace_back(step, loss);
        if (step % 50 == 0 || step + 1 == options.steps) log << "train: step " << step << " loss " << loss << "\n";
    };
    net::TrainLog result;
    try {
        result = net::train(model, samples, options);
    } catch (const NumericalError&) {
        write_text(out / "loss.csv", loss_csv(progress));
        throw;
    }

    save_checkpoint(out / "checkpoint.bin", model);
    write_text(out / "loss.csv", loss_csv(result));
    ordered_json summary;
    summary["config"] = echo(config);
    summary["model"] = model_cfg.echo();
    summary["parameters"] = model.parameter_count();
    ordered_json per = ordered_json::array();
    for (std::size_t i = 0; i < roots.size(); ++i)
        per.push_back({{"root", roots[i]},
                       {"samples", per_root[i]},
                       {"drawn", i < result.root_counts.size() ? result.root_counts[i] : 0}});
    summary["roots"] = per;
    if (!result.losses.empty()) {
        summary["initial_loss"] = result.losses.front().second;
        summary["final_loss"] = result.losses.back().second;
    }
    write_text(out / "train.json", summary.dump(2) + "\n");
    for (std::size_t i = 0; i < roots.size(); ++i)
        log << "train: root " << roots[i] << " drew " << (i < result.root_counts.size() ? result.root_counts[i] : 0)
            << " of " << per_root[i] << " samples\n";
    return kExitOk;
}

}  // namespace fogkit::detail
