#pragma once

#include "fogkit/bench/config.hpp"
#include "fogkit/data/tags.hpp"

#include <exception>
#include <functional>
#include <optional>
#include <ostream>
#include <string>
#include <string_view>
#include <vector>

namespace fogkit {

inline constexpr int kExitOk = 0;
inline constexpr int kExitConfig = 2;
inline constexpr int kExitData = 3;
inline constexpr int kExitNumerical = 4;

struct Command {
    std::string name;
    std::string summary;
    std::vector<ConfigKey> keys;
    /// Returns the exit code; errors propagate as exceptions.
    std::function<int(const RunConfig&, std::ostream& log)> run;

    RunConfig make_config() const { return RunConfig(keys); }
};

/// synth, recompose, defog, train, eval.
const std::vector<Command>& commands();
/// Throws ConfigError for an unknown name.
const Command& find_command(std::string_view name);

/// 2 for configuration and contract errors, 3 for data errors, 4 for
/// numerical aborts, 1 otherwise.
int exit_code(const std::exception& error);

/// Runs `command`, reporting any error on `err` and mapping it to an exit
/// code.
int run_command(const Command& command, const RunConfig& config, std::ostream& log, std::ostream& err);

/// Stop-motion slice file name: pos_<NNNN>_light_<L>_density_<D>.png.
std::string raw_slice_name(const AcquisitionTag& tag);
std::optional<AcquisitionTag> parse_raw_slice_name(std::string_view name);

/// frame_<NNNN>.png
std::string frame_file_name(std::size_t index);
/// pos_<NNNN>.png
std::string depth_file_name(int position);

}  // namespace fogkit
