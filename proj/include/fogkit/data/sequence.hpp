#pragma once

#include "fogkit/data/tags.hpp"
#include "fogkit/image/frame.hpp"

#include <array>
#include <filesystem>
#include <map>
#include <memory>
#include <optional>
#include <string>
#include <utility>
#include <vector>

namespace fogkit {

struct TaggedFrame {
    Frame frame;
    AcquisitionTag tag;
    std::filesystem::path source{};  ///< file it was read from, if any
};

/// Frames of one video in playback order, plus the depth map of every robot
/// position that appears in it (shared across lighting/density variants).
struct FrameSequence {
    std::vector<TaggedFrame> frames;
    std::map<int, std::shared_ptr<const DepthMap>> depth;

    std::size_t size() const { return frames.size(); }
    bool empty() const { return frames.empty(); }
    const Frame& operator[](std::size_t i) const { return frames[i].frame; }
};

/// Per-file tag overrides read from `dataset_root/manifest.json`.
struct Manifest {
    std::filesystem::path root;
    std::map<std::string, AcquisitionTag> overrides;  ///< key: root-relative generic path
    std::optional<double> fps;                         ///< metadata only

    static Manifest load(const std::filesystem::path& dataset_root);
    const AcquisitionTag* find(const std::filesystem::path& file) const;
};

/// Loads `frame_<NNNN>.png` files of one sequence directory, sorted by index.
/// Tags come from the `light_<L>` / `density_<D>` path components (density is
/// `none` under `clear/`) with the frame index as position, unless the
/// manifest overrides them. Throws DataError naming the first bad file.
FrameSequence load_sequence(const std::filesystem::path& directory, const Manifest& manifest = {});

struct LoadIssue {
    std::filesystem::path file;
    std::string message;
};

/// Everything found under a dataset root laid out as
/// `{foggy|clear}/light_<L>[/density_<D>]/frame_<NNNN>.png` and
/// `depth/pos_<NNNN>.png`.
struct DatasetIndex {
    std::vector<FrameSequence> foggy;
    std::vector<FrameSequence> clear;
    std::map<int, std::shared_ptr<const DepthMap>> depth;
    std::vector<LoadIssue> errors;
    std::size_t matched_files = 0;  ///< frame and depth paths matching the layout
    std::size_t loaded_files = 0;   ///< matched_files == loaded_files + errors.size()
    std::optional<double> fps;
};

/// Loads a whole dataset tree. Bad files are reported in `errors`, never
/// skipped silently; sequences with errors are left out.
DatasetIndex scan_dataset(const std::filesystem::path& root);

/// Looks up the clear sequence with the given lighting; nullptr if absent.
const FrameSequence* find_clear(const DatasetIndex& index, int lighting);

using ConditionKey = std::pair<int, Density>;  ///< (lighting, density)

struct RecomposeResult {
    std::map<ConditionKey, FrameSequence> videos;
    std::vector<std::string> warnings;  ///< positions missing from some condition
};

/// Regroups tagged stop-motion slices into one video per (lighting,
/// density), each ordered by position. Throws DataError if a
/// (position, lighting, density) triple occurs twice.
RecomposeResult recompose(std::vector<TaggedFrame> slices);

/// (prev, center, next) indices for each frame, replicating the first and
/// last frame at the sequence edges.
std::vector<std::array<std::size_t, 3>> triplet_indices(std::size_t length);

struct Triplet {
    const Frame* prev;
    const Frame* center;
    const Frame* next;
};

std::vector<Triplet> triplets(const FrameSequence& sequence);

}  // namespace fogkit
