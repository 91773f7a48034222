#include "fogkit/bench/commands.hpp"
#include "fogkit/data/sequence.hpp"
#include "fogkit/errors.hpp"
#include "fogkit/fog/fog_model.hpp"
#include "fogkit/image/png_io.hpp"

#include <doctest.h>
#include <nlohmann/json.hpp>

#include <filesystem>
#include <fstream>
#include <initializer_list>
#include <random>
#include <sstream>

using namespace fogkit;
namespace fs = std::filesystem;

namespace {

struct TempDir {
    fs::path path;
    TempDir() {
        std::random_device rd;
        path = fs::temp_directory_path() / ("fogkit_bench_" + std::to_string(rd()));
        fs::create_directories(path);
    }
    ~TempDir() {
        std::error_code ec;
        fs::remove_all(path, ec);
    }
    std::string operator/(const std::string& name) const { return (path / name).string(); }
};

struct Run {
    int code = 0;
    std::string log, err;
};

Run run(const std::string& name, std::initializer_list<std::string> settings) {
    const Command& command = find_command(name);
    RunConfig config = command.make_config();
    for (const auto& s : settings) config.set(s);
    std::ostringstream log, err;
    Run r;
    r.code = run_command(command, config, log, err);
    r.log = log.str();
    r.err = err.str();
    return r;
}

std::string slurp(const fs::path& p) {
    std::ifstream in(p, std::ios::binary);
    return {std::istreambuf_iterator<char>(in), {}};
}

nlohmann::json read_json(const fs::path& p) { return nlohmann::json::parse(slurp(p)); }

// Relative path -> bytes for every file under root.
std::map<std::string, std::string> tree(const fs::path& root) {
    std::map<std::string, std::string> out;
    for (const auto& e : fs::recursive_directory_iterator(root))
        if (e.is_regular_file()) out[fs::relative(e.path(), root).generic_string()] = slurp(e.path());
    return out;
}

Rect rect_from(const nlohmann::json& j) {
    return {j[0].get<long>(), j[1].get<long>(), j[2].get<long>(), j[3].get<long>()};
}

}  // namespace

TEST_CASE("config files, overrides and unknown keys") {
    TempDir dir;
    RunConfig c({{"alpha", "1", "a"}, {"name", "", "n"}});
    CHECK(c.get("seed") == "0");
    CHECK(c.get_int("alpha") == 1);
    CHECK_FALSE(c.has("name"));
    CHECK_THROWS_AS(c.require("name"), ConfigError);

    {
        std::ofstream f(dir / "a.cfg");
        f << "# header\n  alpha = 7   # trailing\n\nname=x, y ,z\n";
    }
    c.load_file(dir / "a.cfg");
    CHECK(c.get_int("alpha") == 7);
    CHECK(c.get_list("name") == std::vector<std::string>{"x", "y", "z"});
    c.set("alpha=9");
    CHECK(c.get_double("alpha") == 9.0);

    {
        std::ofstream f(dir / "b.cfg");
        f << "alpha=2\nbeta=3\n";
    }
    try {
        c.load_file(dir / "b.cfg");
        FAIL("unknown key accepted");
    } catch (const ConfigError& e) {
        CHECK(std::string(e.what()).find("b.cfg:2") != std::string::npos);
        CHECK(std::string(e.what()).find("beta") != std::string::npos);
    }
    c.set("alpha=1.5x");
    CHECK_THROWS_AS(c.get_double("alpha"), ConfigError);
    CHECK_THROWS_AS(c.set("noequals"), ConfigError);
}

TEST_CASE("every command lists its keys with defaults and has a seed") {
    for (const auto& cmd : commands()) {
        const RunConfig c = cmd.make_config();
        CHECK(c.values().count("seed") == 1);
        const std::string text = c.describe();
        for (const auto& k : c.schema()) CHECK(text.find(k.name) != std::string::npos);
    }
    CHECK(find_command("defog").make_config().describe().find("[0.95]") != std::string::npos);
    CHECK_THROWS_AS(find_command("nope"), ConfigError);
}

TEST_CASE("slice names round trip") {
    const AcquisitionTag tag{3, 2, Density::medium};
    CHECK(raw_slice_name(tag) == "pos_0003_light_2_density_0.05.png");
    CHECK(parse_raw_slice_name(raw_slice_name(tag)) == tag);
    CHECK(parse_raw_slice_name("pos_0001_light_0_density_none.png")->density == Density::clear);
    CHECK_FALSE(parse_raw_slice_name("pos_1_light_0_density_0.07.png"));
    CHECK_FALSE(parse_raw_slice_name("frame_0001.png"));
}

TEST_CASE("synth writes a loadable dataset at the contrast anchors") {
    TempDir dir;
    const Run r = run("synth", {"output=" + dir / "data", "size=64", "positions=4"});
    REQUIRE(r.code == 0);
    const DatasetIndex index = scan_dataset(dir / "data");
    CHECK(index.errors.empty());
    REQUIRE(index.foggy.size() == 3);
    REQUIRE(index.clear.size() == 1);
    CHECK(index.depth.size() == 4);
    for (const auto& s : index.foggy) CHECK(s.size() == 4);

    const auto manifest = read_json(fs::path(dir / "data") / "manifest.json");
    const PanelROI roi{rect_from(manifest["panel"]["black"]), rect_from(manifest["panel"]["white"])};
    for (const auto& s : index.foggy) {
        const double target = density_anchor(s.frames.front().tag.density);
        for (const auto& f : s.frames) CHECK(std::abs(panel_contrast(f.frame, roi) - target) <= 1e-6);
    }
    CHECK(manifest["config"]["seed"] == "0");
    CHECK(fs::exists(fs::path(dir / "data") / "raw" / "pos_0002_light_0_density_0.15.png"));
}

TEST_CASE("synth is byte-identical across runs and follows the seed") {
    TempDir dir;
    REQUIRE(run("synth", {"output=" + dir / "a", "size=64", "positions=3"}).code == 0);
    REQUIRE(run("synth", {"output=" + dir / "b", "size=64", "positions=3"}).code == 0);
    REQUIRE(run("synth", {"output=" + dir / "c", "size=64", "positions=3", "seed=5"}).code == 0);
    auto a = tree(dir / "a"), b = tree(dir / "b"), c = tree(dir / "c");
    // The echoed output path is the only legitimate difference.
    a.erase("manifest.json");
    b.erase("manifest.json");
    c.erase("manifest.json");
    CHECK(a == b);
    CHECK(a != c);
}

TEST_CASE("synth from an existing clear dataset") {
    TempDir dir;
    REQUIRE(run("synth", {"output=" + dir / "src", "size=64", "positions=2", "densities=0.15"}).code == 0);
    const auto manifest = read_json(fs::path(dir / "src") / "manifest.json");
    auto rect = [&](const char* which) {
        std::string s;
        for (int i = 0; i < 4; ++i) s += (i ? "," : "") + std::to_string(manifest["panel"][which][i].get<long>());
        return s;
    };
    const Run r = run("synth", {"output=" + dir / "out", "source=dataset", "input=" + dir / "src",
                                "panel_black=" + rect("black"), "panel_white=" + rect("white"), "raw=false"});
    REQUIRE(r.code == 0);
    const auto contrasts = read_json(fs::path(dir / "out") / "manifest.json")["contrasts"];
    CHECK(contrasts.size() == 3);
    for (const auto& [key, c] : contrasts.items()) {
        CHECK(std::abs(c["min"].get<double>() - c["target"].get<double>()) <= 1e-6);
        CHECK(std::abs(c["max"].get<double>() - c["target"].get<double>()) <= 1e-6);
    }
    CHECK_FALSE(fs::exists(fs::path(dir / "out") / "raw"));

    CHECK(run("synth", {"output=" + dir / "x", "source=dataset", "input=" + dir / "src"}).code == kExitConfig);
    CHECK(run("synth", {"output=" + dir / "x", "source=camera"}).code == kExitConfig);
    CHECK(run("synth", {"output=" + dir / "x", "densities=0.015,0.05", "beta=0.01"}).code == kExitConfig);
}

TEST_CASE("recompose rebuilds the condition grid and rejects duplicates") {
    TempDir dir;
    REQUIRE(run("synth", {"output=" + dir / "data", "size=64", "positions=3", "lightings=6"}).code == 0);
    const Run r = run("recompose", {"input=" + dir / "data/raw", "output=" + dir / "rec"});
    REQUIRE(r.code == 0);
    const DatasetIndex rec = scan_dataset(dir / "rec");
    CHECK(rec.foggy.size() == 18);
    CHECK(rec.clear.size() == 6);
    CHECK(r.log.find("18 foggy videos, 6 clear videos") != std::string::npos);
    CHECK(slurp(fs::path(dir / "rec") / "foggy/light_4/density_0.05/frame_0001.png") ==
          slurp(fs::path(dir / "data") / "foggy/light_4/density_0.05/frame_0001.png"));

    fs::copy_file(fs::path(dir / "data/raw") / "pos_0001_light_0_density_none.png",
                  fs::path(dir / "data/raw") / "pos_1_light_0_density_none.png");
    const Run dup = run("recompose", {"input=" + dir / "data/raw", "output=" + dir / "rec2"});
    CHECK(dup.code == kExitData);
    CHECK(dup.err.find("more than once") != std::string::npos);
}

TEST_CASE("recompose warns about missing positions") {
    TempDir dir;
    REQUIRE(run("synth", {"output=" + dir / "data", "size=64", "positions=3", "densities=0.05"}).code == 0);
    fs::remove(fs::path(dir / "data/raw") / "pos_0001_light_0_density_0.05.png");
    const Run r = run("recompose", {"input=" + dir / "data/raw", "output=" + dir / "rec"});
    CHECK(r.code == 0);
    CHECK(r.log.find("missing positions 1") != std::string::npos);
}

TEST_CASE("defog mirrors input names and records its parameters") {
    TempDir dir;
    REQUIRE(run("synth", {"output=" + dir / "data", "size=64", "positions=3", "densities=0.05"}).code == 0);
    REQUIRE(run("defog", {"input=" + dir / "data", "output=" + dir / "dcp"}).code == 0);
    const DatasetIndex out = scan_dataset(dir / "dcp");
    REQUIRE(out.foggy.size() == 1);
    CHECK(out.foggy[0].size() == 3);
    CHECK(fs::exists(fs::path(dir / "dcp") / "foggy/light_0/density_0.05/frame_0002.png"));
    const auto sidecar = read_json(fs::path(dir / "dcp") / "defog.json");
    CHECK(sidecar["method"] == "dcp");
    CHECK(sidecar["params"]["omega"].get<double>() == 0.95);

    CHECK(run("defog", {"input=" + dir / "data", "output=" + dir / "x", "method=ffa"}).code == kExitConfig);
    CHECK(run("defog", {"input=" + dir / "data", "output=" + dir / "x", "method=tcvd"}).code == kExitConfig);
    CHECK(run("defog", {"input=" + dir / "data", "output=" + dir / "x", "method=tcvd",
                        "checkpoint=" + dir / "missing.bin"})
              .code == kExitData);
    CHECK(run("defog", {"input=" + dir / "none", "output=" + dir / "x"}).code == kExitData);
    CHECK(run("defog", {"input=" + dir / "data", "output=" + dir / "x", "patch=4"}).code == kExitConfig);
}

TEST_CASE("train samples every root and tcvd defog runs from its checkpoint") {
    TempDir dir;
    REQUIRE(run("synth", {"output=" + dir / "a", "size=64", "positions=3", "densities=0.05"}).code == 0);
    REQUIRE(run("synth", {"output=" + dir / "b", "size=64", "positions=3", "densities=0.15", "seed=1"}).code == 0);
    const std::string roots = "roots=" + dir / "a" + "," + dir / "b";
    REQUIRE(run("train", {roots, "output=" + dir / "t1", "steps=20", "seed=2"}).code == 0);
    REQUIRE(run("train", {roots, "output=" + dir / "t2", "steps=20", "seed=2"}).code == 0);
    const std::string csv = slurp(fs::path(dir / "t1") / "loss.csv");
    CHECK(csv.rfind("step,loss\n0,", 0) == 0);
    CHECK(csv == slurp(fs::path(dir / "t2") / "loss.csv"));
    CHECK(slurp(fs::path(dir / "t1") / "checkpoint.bin") == slurp(fs::path(dir / "t2") / "checkpoint.bin"));
    const auto summary = read_json(fs::path(dir / "t1") / "train.json");
    REQUIRE(summary["roots"].size() == 2);
    std::size_t drawn = 0;
    for (const auto& r : summary["roots"]) {
        CHECK(r["samples"].get<std::size_t>() == 3);
        CHECK(r["drawn"].get<std::size_t>() > 0);
        drawn += r["drawn"].get<std::size_t>();
    }
    CHECK(drawn == 20);

    REQUIRE(run("defog", {"input=" + dir / "a", "output=" + dir / "tc", "method=tcvd",
                          "checkpoint=" + dir / "t1/checkpoint.bin"})
                .code == 0);
    const DatasetIndex out = scan_dataset(dir / "tc");
    REQUIRE(out.foggy.size() == 1);
    CHECK(out.foggy[0].size() == 3);
    CHECK(out.foggy[0][0].height() == 64);

    CHECK(run("train", {"roots=" + dir / "a", "output=" + dir / "x", "heads=3"}).code == kExitConfig);
    CHECK(run("train", {"roots=" + dir / "empty", "output=" + dir / "x"}).code == kExitData);
}

TEST_CASE("eval scores restored trees and flags misaligned ones") {
    TempDir dir;
    REQUIRE(run("synth", {"output=" + dir / "data", "size=64", "positions=3"}).code == 0);
    // beta = 0 leaves the "foggy" frames equal to the clear ones.
    REQUIRE(run("synth", {"output=" + dir / "same", "size=64", "positions=3", "densities=0.05", "beta=0"}).code == 0);
    const Run r = run("eval", {"reference=" + dir / "data", "restored=perfect=" + dir / "same", "output=" + dir / "r",
                               "size=0"});
    REQUIRE(r.code == 0);
    const std::string csv = slurp(fs::path(dir / "r") / "report.csv");
    CHECK(csv.rfind("method,density,lighting,ssim,psnr,frames\n", 0) == 0);
    CHECK(csv.find("perfect,0.05,0,1.000000,inf,3") != std::string::npos);
    const auto report = read_json(fs::path(dir / "r") / "report.json");
    CHECK(report["rows"][0]["psnr"] == "inf");
    CHECK(report["config"]["size"] == "0");

    REQUIRE(run("synth", {"output=" + dir / "short", "size=64", "positions=2", "densities=0.05"}).code == 0);
    const Run bad = run("eval", {"reference=" + dir / "data", "restored=s=" + dir / "short", "output=" + dir / "r2"});
    CHECK(bad.code == kExitData);
    CHECK(fs::exists(fs::path(dir / "r2") / "report.csv"));
    CHECK(bad.log.find("positions differ") != std::string::npos);
    CHECK(run("eval", {"reference=" + dir / "data", "restored=" + dir / "same", "output=" + dir / "r3"}).code ==
          kExitConfig);
}
