#pragma once

#include "fogkit/fog/fog_model.hpp"

#include <cstdint>
#include <vector>

namespace fogkit {

struct SceneOptions {
    Eigen::Index size = 128;
    int positions = 12;
    std::uint64_t seed = 0;
    double near_cm = 40.0;   ///< depth of the bottom row
    double far_cm = 240.0;   ///< depth of the top row
    double panel_cm = 150.0;
};

/// Built-in stop-motion scene: a car-like rectangle moving across a textured
/// background of saturated colour tiles, over a linear depth ramp, with a
/// black & white panel at a fixed depth. The panel is gray (white 255, black
/// 145 on the 8-bit scale) so fogged panel values stay exact 8-bit levels.
class ProceduralScene {
public:
    explicit ProceduralScene(SceneOptions options = {});

    const SceneOptions& options() const { return options_; }
    Frame clear(int position, int lighting) const;
    /// Integer centimeters; the car and the panel sit at constant depths.
    DepthMap depth(int position) const;
    const PanelROI& panel() const { return panel_; }
    double panel_depth() const { return options_.panel_cm; }
    /// Michelson contrast of the fog-free panel, 0.275.
    double clear_contrast() const;
    /// Gray at the panel's mean luminance.
    Rgb airlight() const;

private:
    Rect car_rect(int position) const;
    double lighting_gain(int lighting, Eigen::Index y, Eigen::Index x) const;

    SceneOptions options_;
    Frame background_;
    PanelROI panel_;
    Rect panel_rect_;
};

inline constexpr double kPanelWhite = 255.0 / 255.0;
inline constexpr double kPanelBlack = 145.0 / 255.0;

}  // namespace fogkit
