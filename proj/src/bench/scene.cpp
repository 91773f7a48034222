#include "fogkit/bench/scene.hpp"

#include "fogkit/errors.hpp"

#include <cmath>
#include <random>

namespace fogkit {
namespace {

constexpr Eigen::Index kTile = 8;

}  // namespace

ProceduralScene::ProceduralScene(SceneOptions options) : options_(options) {
    const Eigen::Index n = options_.size;
    if (n < 32) throw ConfigError("scene: size must be >= 32, got " + std::to_string(n));
    if (options_.positions < 1) throw ConfigError("scene: positions must be >= 1");
    if (!(options_.near_cm > 0 && options_.far_cm >= options_.near_cm && options_.panel_cm > 0))
        throw ConfigError("scene: depths must be positive with far >= near");

    // Saturated tiles: every colour has one channel close to zero.
    std::mt19937_64 rng(options_.seed);
    auto unit = [&rng] { return double(rng() >> 11) * 0x1.0p-53; };
    background_ = Frame(n, n);
    for (Eigen::Index ty = 0; ty < n; ty += kTile)
        for (Eigen::Index tx = 0; tx < n; tx += kTile) {
            Rgb colour;
            const auto dark = static_cast<Eigen::Index>(rng() % 3);
            for (Eigen::Index c = 0; c < 3; ++c) colour[c] = c == dark ? 0.02 * unit() : 0.35 + 0.6 * unit();
            for (Eigen::Index y = ty; y < std::min(ty + kTile, n); ++y)
                for (Eigen::Index x = tx; x < std::min(tx + kTile, n); ++x) background_.set_pixel(y, x, colour);
        }

    const Eigen::Index side = n / 8;
    panel_rect_ = {n / 16, n - n / 16 - 2 * side, side, 2 * side};
    panel_.black = {panel_rect_.y, panel_rect_.x, side, side};
    panel_.white = {panel_rect_.y, panel_rect_.x + side, side, side};
}

Rect ProceduralScene::car_rect(int position) const {
    const Eigen::Index n = options_.size;
    const Eigen::Index w = n / 4, h = n / 6;
    const Eigen::Index travel = n - w;
    const Eigen::Index x = options_.positions > 1 ? travel * position / (options_.positions - 1) : 0;
    return {n - n / 8 - h, x, h, w};
}

double ProceduralScene::lighting_gain(int lighting, Eigen::Index y, Eigen::Index x) const {
    if (lighting == 0) {
        // Heterogeneous: a warm spot falling off across the frame.
        const double n = double(options_.size);
        const double dy = (y - 0.3 * n) / n, dx = (x - 0.7 * n) / n;
        return 0.7 + 0.3 * std::exp(-4.0 * (dx * dx + dy * dy));
    }
    return 0.55 + 0.09 * lighting;
}

Frame ProceduralScene::clear(int position, int lighting) const {
    if (position < 0 || position >= options_.positions) throw ContractError("scene: position out of range");
    if (lighting < 0 || lighting >= kLightingConditions) throw ContractError("scene: lighting out of range");
    const Eigen::Index n = options_.size;
    Frame f = background_;
    const Rect car = car_rect(position);
    for (Eigen::Index y = car.y; y < car.y + car.height; ++y)
        for (Eigen::Index x = car.x; x < car.x + car.width; ++x) {
            const bool window = y < car.y + car.height / 2 && (x - car.x) % (car.width / 3) > 2 &&
                                y > car.y + 2;
            f.set_pixel(y, x, window ? Rgb(0.05, 0.25, 0.6) : Rgb(0.9, 0.08, 0.02));
        }
    for (Eigen::Index y = 0; y < n; ++y)
        for (Eigen::Index x = 0; x < n; ++x) {
            const double g = lighting_gain(lighting, y, x);
            for (auto& c : f.channels) c(y, x) *= g;
        }
    // The panel is drawn last so lighting never changes its calibration.
    for (const auto& [rect, value] : {std::pair{panel_.black, kPanelBlack}, std::pair{panel_.white, kPanelWhite}})
        for (Eigen::Index y = rect.y; y < rect.y + rect.height; ++y)
            for (Eigen::Index x = rect.x; x < rect.x + rect.width; ++x) f.set_pixel(y, x, Rgb::Constant(value));
    return f;
}

DepthMap ProceduralScene::depth(int position) const {
    if (position < 0 || position >= options_.positions) throw ContractError("scene: position out of range");
    const Eigen::Index n = options_.size;
    Plane d(n, n);
    for (Eigen::Index y = 0; y < n; ++y)
        d.row(y).setConstant(std::round(options_.far_cm - (options_.far_cm - options_.near_cm) * double(y) / double(n - 1)));
    const Rect car = car_rect(position);
    const double car_depth = d(car.y + car.height - 1, 0);
    d.block(car.y, car.x, car.height, car.width).setConstant(car_depth);
    d.block(panel_rect_.y, panel_rect_.x, panel_rect_.height, panel_rect_.width).setConstant(std::round(options_.panel_cm));
    return DepthMap(std::move(d));
}

double ProceduralScene::clear_contrast() const { return (kPanelWhite - kPanelBlack) / (kPanelWhite + kPanelBlack); }

Rgb ProceduralScene::airlight() const { return Rgb::Constant(0.5 * (kPanelWhite + kPanelBlack)); }

}  // namespace fogkit
