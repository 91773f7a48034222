#include "fogkit/data/sequence.hpp"

#include "fogkit/errors.hpp"
#include "fogkit/image/png_io.hpp"

#include <nlohmann/json.hpp>

#include <algorithm>
#include <fstream>
#include <regex>
#include <set>

namespace fs = std::filesystem;

namespace fogkit {
namespace {

const std::regex kFramePattern(R"(frame_(\d+)\.png)");
const std::regex kDepthPattern(R"(pos_(\d+)\.png)");

std::optional<int> match_index(const fs::path& file, const std::regex& pattern) {
    std::smatch m;
    const std::string name = file.filename().string();
    if (!std::regex_match(name, m, pattern)) return std::nullopt;
    return std::stoi(m[1].str());
}

// Indexed files of `dir` matching `pattern`, in index order.
std::vector<std::pair<int, fs::path>> indexed_files(const fs::path& dir, const std::regex& pattern) {
    std::vector<std::pair<int, fs::path>> files;
    if (!fs::is_directory(dir)) return files;
    for (const auto& entry : fs::directory_iterator(dir)) {
        if (!entry.is_regular_file()) continue;
        if (auto idx = match_index(entry.path(), pattern)) files.emplace_back(*idx, entry.path());
    }
    std::sort(files.begin(), files.end());
    return files;
}

std::vector<fs::path> sorted_subdirs(const fs::path& dir, std::string_view prefix) {
    std::vector<fs::path> out;
    if (!fs::is_directory(dir)) return out;
    for (const auto& entry : fs::directory_iterator(dir))
        if (entry.is_directory() && entry.path().filename().string().starts_with(prefix)) out.push_back(entry.path());
    std::sort(out.begin(), out.end());
    return out;
}

// Lighting and density encoded in the directory path.
AcquisitionTag tag_from_directory(const fs::path& dir) {
    AcquisitionTag tag;
    bool have_light = false;
    for (const auto& part : dir) {
        const std::string s = part.string();
        if (s.starts_with("light_")) {
            try {
                std::size_t used = 0;
                tag.lighting = std::stoi(s.substr(6), &used);
                if (used != s.size() - 6) throw std::invalid_argument(s);
            } catch (const std::exception&) {
                throw DataError("cannot parse lighting index from '" + s + "' in " + dir.string());
            }
            have_light = true;
        } else if (s.starts_with("density_")) {
            tag.density = parse_density(s.substr(8));
        }
    }
    if (!have_light) throw DataError("no light_<L> component in " + dir.string());
    return tag;
}

struct LoadedSequence {
    FrameSequence sequence;
    std::vector<LoadIssue> issues;
    std::size_t matched = 0;
};

LoadedSequence load_all(const fs::path& directory, const Manifest& manifest) {
    LoadedSequence out;
    const auto files = indexed_files(directory, kFramePattern);
    out.matched = files.size();
    std::optional<AcquisitionTag> dir_tag;
    std::string dir_error;
    try {
        dir_tag = tag_from_directory(directory);
    } catch (const DataError& e) {
        dir_error = e.what();
    }
    for (const auto& [index, path] : files) {
        try {
            AcquisitionTag tag;
            if (const AcquisitionTag* o = manifest.find(path)) {
                tag = *o;
            } else {
                if (!dir_tag) throw DataError(dir_error);
                tag = *dir_tag;
                tag.position = index;
            }
            validate_tag(tag);
            Frame frame = read_png(path);
            validate_frame(frame, path.string());
            if (!out.sequence.empty() && !same_size(frame, out.sequence[0]))
                throw DataError(path.string() + ": frame is " + std::to_string(frame.width()) + "x" +
                                std::to_string(frame.height()) + " but the sequence is " +
                                std::to_string(out.sequence[0].width()) + "x" + std::to_string(out.sequence[0].height()));
            out.sequence.frames.push_back({std::move(frame), tag, path});
        } catch (const std::exception& e) {
            std::string msg = e.what();
            if (msg.find(path.string()) == std::string::npos) msg = path.string() + ": " + msg;
            out.issues.push_back({path, msg});
        }
    }
    std::stable_sort(out.sequence.frames.begin(), out.sequence.frames.end(),
                     [](const TaggedFrame& a, const TaggedFrame& b) { return a.tag.position < b.tag.position; });
    return out;
}

void attach_depth(FrameSequence& seq, const std::map<int, std::shared_ptr<const DepthMap>>& depth) {
    for (const auto& f : seq.frames) {
        auto it = depth.find(f.tag.position);
        if (it != depth.end()) seq.depth[f.tag.position] = it->second;
    }
}

}  // namespace

Manifest Manifest::load(const fs::path& dataset_root) {
    Manifest m;
    m.root = dataset_root;
    const fs::path file = dataset_root / "manifest.json";
    if (!fs::exists(file)) return m;
    std::ifstream in(file);
    nlohmann::json j;
    try {
        in >> j;
    } catch (const nlohmann::json::exception& e) {
        throw DataError(file.string() + ": " + e.what());
    }
    if (j.contains("fps") && j["fps"].is_number()) m.fps = j["fps"].get<double>();
    if (j.contains("files")) {
        for (const auto& [name, value] : j["files"].items()) {
            AcquisitionTag tag;
            try {
                tag.position = value.at("position").get<int>();
                tag.lighting = value.at("lighting").get<int>();
                tag.density = parse_density(value.at("density").get<std::string>());
            } catch (const nlohmann::json::exception& e) {
                throw DataError(file.string() + ": bad entry for " + name + ": " + e.what());
            }
            m.overrides[name] = tag;
        }
    }
    return m;
}

const AcquisitionTag* Manifest::find(const fs::path& file) const {
    if (overrides.empty()) return nullptr;
    const std::string key = fs::relative(file, root).generic_string();
    auto it = overrides.find(key);
    return it == overrides.end() ? nullptr : &it->second;
}

FrameSequence load_sequence(const fs::path& directory, const Manifest& manifest) {
    if (!fs::is_directory(directory)) throw DataError("sequence directory not found: " + directory.string());
    LoadedSequence loaded = load_all(directory, manifest);
    if (!loaded.issues.empty()) throw DataError(loaded.issues.front().message);
    return std::move(loaded.sequence);
}

DatasetIndex scan_dataset(const fs::path& root) {
    if (!fs::is_directory(root)) throw DataError("dataset root not found: " + root.string());
    DatasetIndex index;
    const Manifest manifest = Manifest::load(root);
    index.fps = manifest.fps;

    for (const auto& [position, path] : indexed_files(root / "depth", kDepthPattern)) {
        ++index.matched_files;
        try {
            index.depth[position] = std::make_shared<const DepthMap>(read_depth_png(path));
            ++index.loaded_files;
        } catch (const std::exception& e) {
            index.errors.push_back({path, e.what()});
        }
    }

    auto take = [&](const fs::path& dir, std::vector<FrameSequence>& into) {
        LoadedSequence loaded = load_all(dir, manifest);
        index.matched_files += loaded.matched;
        index.loaded_files += loaded.sequence.size();
        for (auto& issue : loaded.issues) index.errors.push_back(std::move(issue));
        if (!loaded.issues.empty() || loaded.sequence.empty()) return;
        // Depth maps must line up with the frames they describe.
        for (const auto& f : loaded.sequence.frames) {
            auto it = index.depth.find(f.tag.position);
            if (it != index.depth.end() &&
                (it->second->height() != f.frame.height() || it->second->width() != f.frame.width())) {
                index.errors.push_back({dir, "depth map for position " + std::to_string(f.tag.position) +
                                                 " does not match frame size in " + dir.string()});
                return;
            }
        }
        attach_depth(loaded.sequence, index.depth);
        into.push_back(std::move(loaded.sequence));
    };
    for (const auto& light : sorted_subdirs(root / "foggy", "light_"))
        for (const auto& density : sorted_subdirs(light, "density_")) take(density, index.foggy);
    for (const auto& light : sorted_subdirs(root / "clear", "light_")) take(light, index.clear);

    auto key = [](const FrameSequence& s) {
        return std::pair{s.frames.front().tag.lighting, s.frames.front().tag.density};
    };
    std::stable_sort(index.foggy.begin(), index.foggy.end(), [&](const auto& a, const auto& b) { return key(a) < key(b); });
    std::stable_sort(index.clear.begin(), index.clear.end(), [&](const auto& a, const auto& b) { return key(a) < key(b); });
    return index;
}

const FrameSequence* find_clear(const DatasetIndex& index, int lighting) {
    for (const auto& s : index.clear)
        if (!s.empty() && s.frames.front().tag.lighting == lighting) return &s;
    return nullptr;
}

RecomposeResult recompose(std::vector<TaggedFrame> slices) {
    std::set<AcquisitionTag> seen;
    std::set<int> positions;
    for (const auto& s : slices) {
        if (!seen.insert(s.tag).second)
            throw DataError("ambiguous slices: position " + std::to_string(s.tag.position) + ", lighting " +
                            std::to_string(s.tag.lighting) + ", density " + std::string(density_label(s.tag.density)) +
                            " appears more than once");
        positions.insert(s.tag.position);
    }

    RecomposeResult result;
    for (auto& s : slices) result.videos[{s.tag.lighting, s.tag.density}].frames.push_back(std::move(s));
    for (auto& [key, video] : result.videos) {
        std::sort(video.frames.begin(), video.frames.end(),
                  [](const TaggedFrame& a, const TaggedFrame& b) { return a.tag.position < b.tag.position; });
        if (video.size() == positions.size()) continue;
        std::string missing;
        std::size_t i = 0;
        for (int p : positions) {
            if (i < video.size() && video.frames[i].tag.position == p) {
                ++i;
                continue;
            }
            missing += (missing.empty() ? "" : ", ") + std::to_string(p);
        }
        result.warnings.push_back("lighting " + std::to_string(key.first) + ", density " +
                                  std::string(density_label(key.second)) + ": missing positions " + missing);
    }
    return result;
}

std::vector<std::array<std::size_t, 3>> triplet_indices(std::size_t length) {
    std::vector<std::array<std::size_t, 3>> out;
    out.reserve(length);
    for (std::size_t i = 0; i < length; ++i) out.push_back({i == 0 ? 0 : i - 1, i, i + 1 < length ? i + 1 : i});
    return out;
}

std::vector<Triplet> triplets(const FrameSequence& sequence) {
    std::vector<Triplet> out;
    for (const auto& [p, c, n] : triplet_indices(sequence.size()))
        out.push_back({&sequence[p], &sequence[c], &sequence[n]});
    return out;
}

}  // namespace fogkit
