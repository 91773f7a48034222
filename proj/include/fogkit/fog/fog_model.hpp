#pragma once

#include "fogkit/data/tags.hpp"
#include "fogkit/image/frame.hpp"

namespace fogkit {

struct FogParams {
    double beta = 0.0;  ///< extinction coefficient, 1/cm
    Rgb airlight = Rgb::Constant(1.0);
};

/// Throws ContractError for negative beta or airlight outside [0, 1].
void validate(const FogParams& params);

/// Half-open pixel rectangle [y, y + height) x [x, x + width).
struct Rect {
    Eigen::Index y = 0, x = 0, height = 0, width = 0;

    bool empty() const { return height <= 0 || width <= 0; }
    bool overlaps(const Rect& o) const {
        return y < o.y + o.height && o.y < y + height && x < o.x + o.width && o.x < x + width;
    }
    bool operator==(const Rect&) const = default;
};

struct PanelROI {
    Rect black;
    Rect white;
};

/// Throws ContractError unless both rectangles are non-empty, disjoint, and
/// inside a height x width frame.
void validate(const PanelROI& roi, Eigen::Index height, Eigen::Index width);

/// exp(-beta * depth), 1 where the depth is invalid.
Plane transmission(const DepthMap& depth, double beta);

/// I = J t + A (1 - t) per channel, clamped to [0, 1].
Frame apply_fog(const Frame& clear, const DepthMap& depth, const FogParams& params);
Frame apply_fog(const Frame& clear, const Plane& transmission, const Rgb& airlight);

double mean_luminance(const Frame& frame, const Rect& region);

/// Michelson contrast of the mean luminances of the two panel patches.
double panel_contrast(const Frame& frame, const PanelROI& roi);

/// Nearest contrast anchor with boundaries at the geometric means of
/// neighbouring anchors; anything above 0.30 counts as clear.
Density density_class(double contrast);

/// Extinction that scales a panel at `panel_depth` cm from contrast
/// `clear_contrast` down to `target`, assuming the airlight equals the panel's
/// mean luminance. Throws InfeasibleTarget if target > clear_contrast.
double beta_for_contrast(double panel_depth, double clear_contrast, double target);

/// Gray airlight at the mean of the two patch luminances, which makes the
/// contrast scale exactly by the panel transmission.
Rgb panel_airlight(const Frame& clear, const PanelROI& roi);

}  // namespace fogkit
