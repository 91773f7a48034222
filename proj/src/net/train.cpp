#include "fogkit/net/train.hpp"

#include "fogkit/autodiff/adam.hpp"
#include "fogkit/autodiff/raw_io.hpp"
#include "fogkit/data/sequence.hpp"
#include "fogkit/data/transform.hpp"
#include "fogkit/errors.hpp"

#include <cmath>
#include <fstream>
#include <random>

namespace fogkit::net {
namespace {

constexpr char kMagic[8] = {'F', 'O', 'G', 'K', 'I', 'T', 'C', 'K'};
constexpr std::uint32_t kVersion = 1;

void check_frame(const Frame& f, Index size, const char* what) {
    if (f.height() != size || f.width() != size)
        throw ShapeError(std::string(what) + ": frames must be " + std::to_string(size) + "x" + std::to_string(size) +
                         ", got " + std::to_string(f.width()) + "x" + std::to_string(f.height()));
}

}  // namespace

TrainLog train(TcvdModel& model, std::span<const TrainingSample> samples, const TrainOptions& options) {
    if (samples.empty()) throw DataError("train: no training samples");
    if (options.batch < 1) throw ConfigError("train: batch must be >= 1");
    const TcvdConfig& config = model.config();
    std::size_t roots = 0;
    for (const auto& s : samples) {
        for (const auto& f : s.triplet) check_frame(f, config.input_size, "train");
        check_frame(s.target, config.input_size, "train");
        roots = std::max(roots, s.root + 1);
    }

    TrainLog log;
    log.root_counts.assign(roots, 0);
    std::mt19937_64 rng(options.seed);
    ad::AdamState adam;
    adam.learning_rate = options.learning_rate;
    std::vector<ad::Tensor*> tensors;
    for (auto& [name, t] : model.parameters()) tensors.push_back(&t);

    for (int step = 0; step < options.steps; ++step) {
        for (const auto& [name, t] : model.parameters())
            if (!t.data().allFinite())
                throw NumericalError("train: parameter '" + name + "' holds a non-finite value before step " +
                                     std::to_string(step));
        std::vector<Frame> inputs, targets;
        for (Index b = 0; b < options.batch; ++b) {
            const TrainingSample& s = samples[rng() % samples.size()];
            const std::uint64_t aug_seed = rng();
            ++log.root_counts[s.root];
            const DihedralTransform tf = options.augment ? sample_dihedral(aug_seed) : DihedralTransform{};
            for (const auto& f : s.triplet) inputs.push_back(apply(tf, f));
            targets.push_back(apply(tf, s.target));
        }
        std::vector<const Frame*> in_ptrs, gt_ptrs;
        for (const auto& f : inputs) in_ptrs.push_back(&f);
        for (const auto& f : targets) gt_ptrs.push_back(&f);

        for (ad::Tensor* t : tensors) t->zero_grad();
        ad::Tape tape;
        const Params params = watch_parameters(tape, model);
        const ad::Var pred = forward(params, config, tape.constant(stack_frames(in_ptrs)));
        const ad::Var loss = tcvd_loss(pred, tape.constant(stack_frames(gt_ptrs)), config.loss_a, config.loss_b);
        const double value = loss.item();
        if (!std::isfinite(value)) {
            const auto where = tape.first_non_finite();
            throw NumericalError("train: non-finite loss at step " + std::to_string(step) +
                                 (where ? "; first non-finite value from " + *where : std::string()));
        }
        tape.backward(loss);
        ad::adam_step(tensors, adam);
        log.losses.emplace_back(step, value);
        if (options.on_step) options.on_step(step, value);
    }
    return log;
}

std::vector<Frame> infer_video(const TcvdModel& model, std::span<const Frame> frames) {
    const TcvdConfig& config = model.config();
    for (const auto& f : frames) check_frame(f, config.input_size, "infer_video");
    std::vector<Frame> out;
    out.reserve(frames.size());
    for (const auto& [p, c, n] : triplet_indices(frames.size())) {
        ad::Tape tape;
        const Params params = constant_parameters(tape, model);
        const std::array<const Frame*, 3> triplet{&frames[p], &frames[c], &frames[n]};
        const ad::Var pred = forward(params, config, tape.constant(stack_frames(triplet)));
        out.push_back(unstack_frame(pred.value(), pred.shape(), 0));
    }
    return out;
}

void save_checkpoint(const std::filesystem::path& path, const TcvdModel& model) {
    std::ofstream out(path, std::ios::binary);
    if (!out) throw DataError("cannot write checkpoint " + path.string());
    out.write(kMagic, sizeof kMagic);
    ad::write_le<std::uint32_t>(out, kVersion);
    const std::string echo = model.config().echo();
    ad::write_le<std::uint32_t>(out, static_cast<std::uint32_t>(echo.size()));
    out.write(echo.data(), static_cast<std::streamsize>(echo.size()));
    ad::write_le<std::uint32_t>(out, static_cast<std::uint32_t>(model.parameters().size()));
    for (const auto& [name, t] : model.parameters()) {
        ad::write_le<std::uint32_t>(out, static_cast<std::uint32_t>(name.size()));
        out.write(name.data(), static_cast<std::streamsize>(name.size()));
        ad::write_tensor(out, t);
    }
    if (!out) throw DataError("failed writing checkpoint " + path.string());
}

TcvdModel load_checkpoint(const std::filesystem::path& path, const std::optional<TcvdConfig>& expected) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw DataError("cannot open checkpoint " + path.string());
    char magic[sizeof kMagic];
    in.read(magic, sizeof magic);
    if (!in || !std::equal(magic, magic + sizeof magic, kMagic)) throw DataError(path.string() + " is not a checkpoint");
    if (const auto v = ad::read_le<std::uint32_t>(in); v != kVersion)
        throw DataError(path.string() + ": unsupported checkpoint version " + std::to_string(v));
    auto read_string = [&in, &path] {
        const auto len = ad::read_le<std::uint32_t>(in);
        if (!in || len > (1u << 20)) throw DataError(path.string() + ": corrupt checkpoint");
        std::string s(len, '\0');
        in.read(s.data(), len);
        if (!in) throw DataError(path.string() + ": truncated checkpoint");
        return s;
    };
    const TcvdConfig config = TcvdConfig::parse_echo(read_string());
    if (expected && !(*expected == config))
        throw ConfigError("checkpoint " + path.string() + " was written for a different configuration:\n" +
                          config.echo() + "expected:\n" + expected->echo());
    TcvdModel model(config);
    const auto count = ad::read_le<std::uint32_t>(in);
    if (!in || count != model.parameters().size())
        throw DataError(path.string() + ": checkpoint holds " + std::to_string(count) + " tensors, model has " +
                        std::to_string(model.parameters().size()));
    for (std::uint32_t i = 0; i < count; ++i) {
        const std::string name = read_string();
        ad::Tensor t = ad::read_tensor(in);
        auto it = model.parameters().find(name);
        if (it == model.parameters().end()) throw DataError(path.string() + ": unexpected tensor " + name);
        if (it->second.shape() != t.shape())
            throw DataError(path.string() + ": tensor " + name + " has shape " + ad::to_string(t.shape()) +
                            ", model expects " + ad::to_string(it->second.shape()));
        it->second.data() = t.data();
    }
    return model;
}

}  // namespace fogkit::net
