#include "fogkit/bench/scene.hpp"
#include "fogkit/errors.hpp"
#include "fogkit/fog/fog_model.hpp"

#include <doctest.h>

#include <cmath>
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

PanelROI test_roi() { return {{2, 2, 4, 4}, {2, 8, 4, 4}}; }

// Frame with the panel painted at the given gray levels.
Frame panel_frame(double black, double white, std::mt19937_64& rng) {
    Frame f = random_frame(16, 16, rng);
    const PanelROI roi = test_roi();
    for (auto [r, v] : {std::pair{roi.black, black}, std::pair{roi.white, white}})
        for (Eigen::Index y = r.y; y < r.y + r.height; ++y)
            for (Eigen::Index x = r.x; x < r.x + r.width; ++x) f.set_pixel(y, x, Rgb::Constant(v));
    return f;
}

}  // namespace

TEST_CASE("transmission follows the exponential law") {
    Plane d(2, 2);
    d << 0.0, 1.0, 2.0, 5.0;
    const DepthMap depth(d, Mask::Constant(2, 2, true));
    const Plane t = transmission(depth, std::log(2.0));
    CHECK(t(0, 0) == 1.0);
    CHECK(t(0, 1) == doctest::Approx(0.5).epsilon(1e-15));
    CHECK(t(1, 0) == doctest::Approx(0.25).epsilon(1e-15));
    CHECK((transmission(depth, 0.0) == 1.0).all());
    CHECK_THROWS_AS(transmission(depth, -0.1), ContractError);

    const Plane t_invalid = transmission(DepthMap(d), 3.0);
    CHECK(t_invalid(0, 0) == 1.0);  // depth 0 is not a measurement
}

TEST_CASE("apply_fog examples") {
    std::mt19937_64 rng(1);
    const Frame j = random_frame(9, 9, rng);
    const DepthMap depth(Plane::Constant(9, 9, 50.0));
    CHECK(apply_fog(j, depth, {0.0, Rgb(0.3, 0.4, 0.5)}) == j);

    const Frame far = apply_fog(j, DepthMap(Plane::Constant(9, 9, 1e6)), {1.0, Rgb(0.3, 0.4, 0.5)});
    CHECK((far[2] - 0.5).abs().maxCoeff() < 1e-12);

    const Frame one = apply_fog(Frame::constant(8, 8, Rgb::Constant(0.8)), Plane::Constant(8, 8, 0.5), Rgb::Constant(0.5));
    CHECK(one[0](3, 3) == doctest::Approx(0.65).epsilon(1e-15));

    CHECK_THROWS_AS(apply_fog(j, DepthMap(Plane::Constant(8, 9, 1.0)), {0.1, Rgb::Constant(0.5)}), ShapeError);
    CHECK_THROWS_AS(apply_fog(j, depth, {0.1, Rgb(0.5, 1.2, 0.5)}), ContractError);
}

TEST_CASE("apply_fog is a per-pixel convex combination") {
    std::mt19937_64 rng(2);
    const Frame j = random_frame(12, 12, rng);
    Plane d = Plane::Random(12, 12).abs() * 300.0 + 1.0;
    const Rgb a(0.7, 0.2, 0.9);
    const Frame i = apply_fog(j, DepthMap(d), {0.01, a});
    for (std::size_t c = 0; c < 3; ++c) {
        const Plane lo = j[c].min(a[Eigen::Index(c)]) - 1e-15, hi = j[c].max(a[Eigen::Index(c)]) + 1e-15;
        CHECK(((i[c] >= lo) && (i[c] <= hi)).all());
    }
}

TEST_CASE("panel_contrast examples and errors") {
    std::mt19937_64 rng(3);
    CHECK(panel_contrast(panel_frame(0.1, 0.9, rng), test_roi()) == doctest::Approx(0.8).epsilon(1e-12));
    CHECK(panel_contrast(panel_frame(0.4, 0.4, rng), test_roi()) == 0.0);
    CHECK(panel_contrast(panel_frame(0.0, 0.0, rng), test_roi()) == 0.0);
    CHECK_THROWS_AS(panel_contrast(panel_frame(0.1, 0.9, rng), {{2, 2, 0, 4}, {2, 8, 4, 4}}), ContractError);
    CHECK_THROWS_AS(panel_contrast(panel_frame(0.1, 0.9, rng), {{2, 2, 4, 4}, {3, 3, 4, 4}}), ContractError);
    CHECK_THROWS_AS(panel_contrast(panel_frame(0.1, 0.9, rng), {{2, 2, 4, 4}, {2, 14, 4, 4}}), ContractError);
}

TEST_CASE("contrast scales by the panel transmission when airlight is the panel mean") {
    std::mt19937_64 rng(4);
    const Frame j = panel_frame(0.2, 0.7, rng);
    const double c0 = panel_contrast(j, test_roi());
    const Rgb a = panel_airlight(j, test_roi());
    const double d = 123.0;
    double previous = c0;
    for (double beta : {0.001, 0.004, 0.01, 0.03}) {
        Plane depth = Plane::Random(16, 16).abs() * 200.0 + 1.0;
        depth.block(2, 2, 4, 10).setConstant(d);
        const double c = panel_contrast(apply_fog(j, DepthMap(depth), {beta, a}), test_roi());
        CHECK(std::abs(c - std::exp(-beta * d) * c0) < 1e-12);
        CHECK(c < previous);
        previous = c;
    }
}

TEST_CASE("density_class anchors and order") {
    CHECK(density_class(0.015) == Density::dense);
    CHECK(density_class(0.05) == Density::medium);
    CHECK(density_class(0.15) == Density::light);
    CHECK(density_class(0.5) == Density::clear);
    CHECK(density_class(0.027) == Density::dense);
    CHECK(density_class(0.028) == Density::medium);
    CHECK(density_class(0.086) == Density::medium);
    CHECK(density_class(0.087) == Density::light);
    CHECK(density_class(0.30) == Density::light);
    // Lighter classes never come before denser ones as contrast grows.
    auto rank = [](Density d) { return d == Density::clear ? 3 : static_cast<int>(d) - 1; };
    int last = 0;
    for (double c = 0.0; c <= 1.0; c += 0.001) {
        CHECK(rank(density_class(c)) >= last);
        last = rank(density_class(c));
    }
}

TEST_CASE("beta_for_contrast closes the loop") {
    CHECK(beta_for_contrast(100.0, 0.3, 0.3) == 0.0);
    CHECK(beta_for_contrast(1.0, 0.8, 0.4) == doctest::Approx(std::log(2.0)).epsilon(1e-15));
    CHECK_THROWS_AS(beta_for_contrast(1.0, 0.2, 0.4), InfeasibleTarget);
    CHECK_THROWS_AS(beta_for_contrast(0.0, 0.8, 0.4), ContractError);

    const ProceduralScene scene(SceneOptions{.size = 64, .positions = 2});
    const Frame j = scene.clear(1, 0);
    CHECK(panel_contrast(j, scene.panel()) == doctest::Approx(scene.clear_contrast()).epsilon(1e-14));
    CHECK(scene.clear_contrast() == doctest::Approx(0.275).epsilon(1e-14));
    for (Density d : kFogDensities) {
        const double beta = beta_for_contrast(scene.panel_depth(), scene.clear_contrast(), density_anchor(d));
        const Frame i = apply_fog(j, scene.depth(1), {beta, scene.airlight()});
        CHECK(std::abs(panel_contrast(i, scene.panel()) - density_anchor(d)) < 1e-9);
        CHECK(density_class(panel_contrast(i, scene.panel())) == d);
    }
}
