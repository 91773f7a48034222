#pragma once

#include "fogkit/net/tcvd.hpp"

#include <array>
#include <filesystem>
#include <functional>
#include <optional>
#include <span>
#include <utility>
#include <vector>

namespace fogkit::net {

/// A foggy (prev, center, next) triplet and the clear center frame. `root`
/// identifies the dataset the sample came from.
struct TrainingSample {
    std::array<Frame, 3> triplet;
    Frame target;
    std::size_t root = 0;
};

struct TrainOptions {
    int steps = 500;
    Index batch = 1;
    double learning_rate = 1e-4;
    std::uint64_t seed = 0;
    bool augment = true;
    /// Called after every step with (step, loss).
    std::function<void(int, double)> on_step{};
};

struct TrainLog {
    std::vector<std::pair<int, double>> losses;  ///< loss before each update
    std::vector<std::size_t> root_counts;        ///< samples drawn per root
};

/// ADAM on the configured loss. Samples are drawn uniformly with
/// replacement and, if enabled, augmented with one dihedral transform per
/// sample. Throws NumericalError naming the first op that produced a
/// non-finite value.
TrainLog train(TcvdModel& model, std::span<const TrainingSample> samples, const TrainOptions& options);

/// Restores every frame from its edge-replicated triplet. Frames must be
/// input_size x input_size.
std::vector<Frame> infer_video(const TcvdModel& model, std::span<const Frame> frames);

/// Versioned binary file: magic, config echo, then named tensors.
void save_checkpoint(const std::filesystem::path& path, const TcvdModel& model);
/// Throws DataError for an unreadable file and ConfigError if `expected` is
/// given and differs from the stored configuration.
TcvdModel load_checkpoint(const std::filesystem::path& path, const std::optional<TcvdConfig>& expected = std::nullopt);

}  // namespace fogkit::net
