#include "fogkit/bench/scene.hpp"
#include "fogkit/dcp/dcp.hpp"
#include "fogkit/errors.hpp"
#include "fogkit/metrics/metrics.hpp"

#include <doctest.h>

#include <algorithm>
#include <random>

using namespace fogkit;

namespace {

Frame random_frame(Eigen::Index h, Eigen::Index w, std::mt19937_64& rng) {
    std::uniform_real_distribution<double> u(0, 1);
    Frame f(h, w);
    for (auto& c : f.channels)
        for (Eigen::Index i = 0; i < c.size(); ++i) c.data()[i] = u(rng);
    return f;
}

// Clipped-window mean computed directly.
Plane brute_box(const Plane& p, Eigen::Index r) {
    Plane out(p.rows(), p.cols());
    for (Eigen::Index y = 0; y < p.rows(); ++y)
        for (Eigen::Index x = 0; x < p.cols(); ++x) {
            double s = 0;
            int n = 0;
            for (Eigen::Index yy = y - r; yy <= y + r; ++yy)
                for (Eigen::Index xx = x - r; xx <= x + r; ++xx)
                    if (yy >= 0 && yy < p.rows() && xx >= 0 && xx < p.cols()) {
                        s += p(yy, xx);
                        ++n;
                    }
            out(y, x) = s / n;
        }
    return out;
}

double median(Plane p) {
    std::vector<double> v(p.data(), p.data() + p.size());
    std::nth_element(v.begin(), v.begin() + v.size() / 2, v.end());
    return v[v.size() / 2];
}

}  // namespace

TEST_CASE("dark_channel examples") {
    CHECK((dark_channel(Frame::constant(9, 9, Rgb::Ones()), 3) == 1.0).all());
    CHECK_THROWS_AS(dark_channel(Frame::constant(9, 9, Rgb::Ones()), 4), ContractError);

    std::mt19937_64 rng(1);
    Frame f = random_frame(12, 12, rng);
    for (Eigen::Index y = 0; y < 12; y += 3)
        for (Eigen::Index x = 0; x < 12; x += 3) f[(y + x) % 3](y, x) = 0.0;
    CHECK((dark_channel(f, 5) == 0.0).all());

    const Frame g = random_frame(10, 7, rng);
    CHECK((dark_channel(g, 1) == g[0].min(g[1]).min(g[2])).all());

    // Edge replication: the corner's 3x3 window covers rows/cols 0..1.
    const Plane d = dark_channel(g, 3);
    const Plane cmin = g[0].min(g[1]).min(g[2]);
    CHECK(d(0, 0) == cmin.block(0, 0, 2, 2).minCoeff());
    CHECK(d(5, 3) == cmin.block(4, 2, 3, 3).minCoeff());
}

TEST_CASE("dark_channel is monotone under brightening") {
    std::mt19937_64 rng(2);
    const Frame f = random_frame(16, 16, rng);
    Frame g = f;
    for (auto& c : g.channels) c += 0.1;
    CHECK((dark_channel(g, 5) >= dark_channel(f, 5)).all());
}

TEST_CASE("estimate_airlight examples") {
    const Rgb a(0.6, 0.7, 0.8);
    const Frame flat = Frame::constant(20, 20, a);
    CHECK((estimate_airlight(flat, dark_channel(flat, 15)) == a).all());

    const ProceduralScene scene(SceneOptions{.size = 64, .positions = 1});
    Frame clear = scene.clear(0, 3);
    for (Eigen::Index y = 20; y < 40; ++y)
        for (Eigen::Index x = 10; x < 30; ++x) clear.set_pixel(y, x, Rgb::Ones());
    CHECK((estimate_airlight(clear, dark_channel(clear, 15)) - 1.0).abs().maxCoeff() < 1e-12);

    CHECK((estimate_airlight(Frame::constant(8, 8, Rgb::Zero()), Plane::Zero(8, 8)) == 0.05).all());
}

TEST_CASE("estimate_airlight recovers a known airlight from synthetic fog") {
    const ProceduralScene scene(SceneOptions{.size = 96, .positions = 2, .far_cm = 400.0});
    const Rgb a = Rgb::Constant(0.8);
    const double beta = beta_for_contrast(scene.panel_depth(), scene.clear_contrast(), 0.05);
    const Frame foggy = apply_fog(scene.clear(1, 2), scene.depth(1), {beta, a});
    const Rgb est = estimate_airlight(foggy, dark_channel(foggy, 15));
    CHECK((est - a).abs().maxCoeff() <= 0.05);
}

TEST_CASE("estimate_transmission examples") {
    const Rgb a(0.6, 0.7, 0.8);
    CHECK((estimate_transmission(Frame::constant(16, 16, a), a) == 0.1).all());
    const Frame half = Frame::constant(16, 16, 0.5 * a);
    CHECK((estimate_transmission(half, a) - 0.525).abs().maxCoeff() < 1e-15);

    const ProceduralScene scene(SceneOptions{.size = 96, .positions = 1});
    const double beta = 0.01, d = 100.0;
    const Frame foggy = apply_fog(scene.clear(0, 1), DepthMap(Plane::Constant(96, 96, d)), {beta, scene.airlight()});
    CHECK(std::abs(median(estimate_transmission(foggy, scene.airlight())) - std::exp(-beta * d)) <= 0.1);
}

TEST_CASE("box filter matches the direct window mean") {
    std::mt19937_64 rng(3);
    const Plane p = random_frame(13, 21, rng)[0];
    for (Eigen::Index r : {0, 1, 4, 15}) CHECK((box_filter(p, r) - brute_box(p, r)).abs().maxCoeff() < 1e-12);
}

TEST_CASE("refine_transmission examples") {
    std::mt19937_64 rng(4);
    const Frame guide = random_frame(24, 24, rng);
    CHECK((refine_transmission(Plane::Constant(24, 24, 0.4), guide) - 0.4).abs().maxCoeff() < 1e-12);

    // With a huge eps the filter degenerates to two box passes.
    const Plane t = 0.1 + 0.9 * random_frame(24, 24, rng)[1];
    const Plane smooth = refine_transmission(t, guide, 3, 1e12);
    CHECK((smooth - brute_box(brute_box(t, 3), 3)).abs().maxCoeff() < 1e-9);

    for (int trial = 0; trial < 20; ++trial) {
        const Plane ti = 0.1 + 0.9 * random_frame(24, 24, rng)[2];
        const Plane out = refine_transmission(ti, random_frame(24, 24, rng), 15, 1e-3);
        CHECK(out.minCoeff() >= ti.minCoeff() - 0.05);
        CHECK(out.maxCoeff() <= ti.maxCoeff() + 0.05);
        CHECK(out.minCoeff() >= 0.1);
        CHECK(out.maxCoeff() <= 1.0);
    }
}

TEST_CASE("recover inverts the scattering model") {
    std::mt19937_64 rng(5);
    const Frame i = random_frame(16, 16, rng);
    const Frame same = recover(i, Plane::Ones(16, 16), Rgb(0.7, 0.8, 0.9));
    for (std::size_t c = 0; c < 3; ++c) CHECK((same[c] - i[c]).abs().maxCoeff() < 1e-15);

    const Rgb a(0.7, 0.8, 0.9);
    const Frame fog = Frame::constant(16, 16, a);
    CHECK((recover(fog, Plane::Constant(16, 16, 0.3), a)[1] - 0.8).abs().maxCoeff() < 1e-15);

    for (int trial = 0; trial < 5; ++trial) {
        const Frame j = random_frame(16, 16, rng);
        const Plane depth = Plane::Random(16, 16).abs() * 200.0 + 1.0;
        const double beta = 0.005 * (trial + 1);
        const Plane t = transmission(DepthMap(depth), beta);
        const Frame back = recover(apply_fog(j, DepthMap(depth), {beta, a}), t, a);
        for (std::size_t c = 0; c < 3; ++c) CHECK(((back[c] - j[c]).abs() <= 1e-6 || t < 0.1).all());
    }
}

TEST_CASE("dcp_defog_video keeps length and frame independence") {
    const ProceduralScene scene(SceneOptions{.size = 48, .positions = 4});
    std::vector<Frame> frames;
    for (int p = 0; p < 4; ++p) frames.push_back(scene.clear(p, 0));
    const auto out = dcp_defog_video(frames);
    REQUIRE(out.size() == 4);
    std::vector<Frame> reversed(frames.rbegin(), frames.rend());
    const auto out_rev = dcp_defog_video(reversed);
    for (std::size_t i = 0; i < 4; ++i) CHECK(out_rev[i] == out[3 - i]);
    CHECK_THROWS_AS(dcp_defog_video(frames, DcpParams{.patch = 4}), ContractError);
}

TEST_CASE("dcp leaves clear scenes mostly intact and improves foggy ones") {
    const ProceduralScene scene(SceneOptions{.size = 96, .positions = 4});
    const double beta = beta_for_contrast(scene.panel_depth(), scene.clear_contrast(), 0.05);
    double foggy_ssim = 0, dcp_ssim = 0;
    for (int p = 0; p < 4; ++p) {
        const Frame j = scene.clear(p, p);
        CHECK(ssim(dcp_defog(j), j) >= 0.8);
        const Frame i = apply_fog(j, scene.depth(p), {beta, scene.airlight()});
        foggy_ssim += ssim(i, j) / 4;
        dcp_ssim += ssim(dcp_defog(i), j) / 4;
    }
    CHECK(dcp_ssim > foggy_ssim + 0.05);
}
