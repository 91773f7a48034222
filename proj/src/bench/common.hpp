#pragma once

#include "fogkit/bench/commands.hpp"
#include "fogkit/data/sequence.hpp"

#include <nlohmann/json.hpp>

#include <filesystem>
#include <ostream>
#include <string_view>

namespace fogkit::detail {

namespace fs = std::filesystem;
using ordered_json = nlohmann::ordered_json;

ordered_json echo(const RunConfig& config);
/// Writes bytes verbatim; throws DataError on failure.
void write_text(const fs::path& path, std::string_view text);
/// Creates a directory tree; throws DataError on failure.
void make_dirs(const fs::path& dir);
/// Throws DataError unless `dir` is an existing directory.
void require_dir(const fs::path& dir, const std::string& key);
/// scan_dataset that turns any load error into a DataError.
DatasetIndex scan_strict(const fs::path& root);
/// Frames of a sequence without their tags.
std::vector<Frame> frames_of(const FrameSequence& seq);
/// Positions of a sequence in playback order.
std::vector<int> positions_of(const FrameSequence& seq);
/// "foggy/light_<L>/density_<D>" or "clear/light_<L>".
fs::path condition_dir(int lighting, Density density);

std::vector<ConfigKey> synth_keys();
std::vector<ConfigKey> recompose_keys();
std::vector<ConfigKey> defog_keys();
std::vector<ConfigKey> train_keys();
std::vector<ConfigKey> eval_keys();

int cmd_synth(const RunConfig& config, std::ostream& log);
int cmd_recompose(const RunConfig& config, std::ostream& log);
int cmd_defog(const RunConfig& config, std::ostream& log);
int cmd_train(const RunConfig& config, std::ostream& log);
int cmd_eval(const RunConfig& config, std::ostream& log);

}  // namespace fogkit::detail
