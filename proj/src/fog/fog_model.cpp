#include "fogkit/fog/fog_model.hpp"

#include "fogkit/errors.hpp"

#include <cmath>

namespace fogkit {

void validate(const FogParams& params) {
    if (!(params.beta >= 0.0)) throw ContractError("fog: beta must be >= 0, got " + std::to_string(params.beta));
    if (!((params.airlight >= 0.0).all() && (params.airlight <= 1.0).all()))
        throw ContractError("fog: airlight channels must lie in [0, 1]");
}

void validate(const PanelROI& roi, Eigen::Index height, Eigen::Index width) {
    for (const Rect* r : {&roi.black, &roi.white}) {
        if (r->empty()) throw ContractError("panel ROI: empty rectangle");
        if (r->y < 0 || r->x < 0 || r->y + r->height > height || r->x + r->width > width)
            throw ContractError("panel ROI: rectangle outside the " + std::to_string(width) + "x" +
                                std::to_string(height) + " frame");
    }
    if (roi.black.overlaps(roi.white)) throw ContractError("panel ROI: black and white rectangles overlap");
}

Plane transmission(const DepthMap& depth, double beta) {
    if (!(beta >= 0.0)) throw ContractError("transmission: beta must be >= 0, got " + std::to_string(beta));
    return depth.valid.select((-beta * depth.depth).exp(), Plane::Ones(depth.height(), depth.width()));
}

Frame apply_fog(const Frame& clear, const Plane& t, const Rgb& airlight) {
    if (t.rows() != clear.height() || t.cols() != clear.width())
        throw ShapeError("apply_fog: transmission is " + std::to_string(t.cols()) + "x" + std::to_string(t.rows()) +
                         " but the frame is " + std::to_string(clear.width()) + "x" + std::to_string(clear.height()));
    Frame out;
    for (std::size_t c = 0; c < 3; ++c)
        out[c] = (clear[c] * t + airlight[static_cast<Eigen::Index>(c)] * (1.0 - t)).max(0.0).min(1.0);
    return out;
}

Frame apply_fog(const Frame& clear, const DepthMap& depth, const FogParams& params) {
    validate(params);
    if (depth.height() != clear.height() || depth.width() != clear.width())
        throw ShapeError("apply_fog: depth map size does not match the frame");
    return apply_fog(clear, transmission(depth, params.beta), params.airlight);
}

double mean_luminance(const Frame& frame, const Rect& r) {
    if (r.empty()) throw ContractError("mean_luminance: empty region");
    double total = 0.0;
    for (Eigen::Index y = r.y; y < r.y + r.height; ++y)
        for (Eigen::Index x = r.x; x < r.x + r.width; ++x) total += luminance(Rgb(frame.pixel(y, x)));
    return total / static_cast<double>(r.height * r.width);
}

double panel_contrast(const Frame& frame, const PanelROI& roi) {
    validate(roi, frame.height(), frame.width());
    const double lw = mean_luminance(frame, roi.white);
    const double lb = mean_luminance(frame, roi.black);
    if (lw + lb == 0.0) return 0.0;
    return std::abs(lw - lb) / (lw + lb);
}

Density density_class(double c) {
    if (c > 0.30) return Density::clear;
    if (c < std::sqrt(0.015 * 0.05)) return Density::dense;
    if (c < std::sqrt(0.05 * 0.15)) return Density::medium;
    return Density::light;
}

double beta_for_contrast(double panel_depth, double clear_contrast, double target) {
    if (!(panel_depth > 0.0)) throw ContractError("beta_for_contrast: panel depth must be positive");
    if (!(target > 0.0)) throw ContractError("beta_for_contrast: target contrast must be positive");
    if (target > clear_contrast)
        throw InfeasibleTarget("beta_for_contrast: target contrast " + std::to_string(target) +
                               " exceeds the clear contrast " + std::to_string(clear_contrast));
    return std::log(clear_contrast / target) / panel_depth;
}

Rgb panel_airlight(const Frame& clear, const PanelROI& roi) {
    validate(roi, clear.height(), clear.width());
    return Rgb::Constant(0.5 * (mean_luminance(clear, roi.white) + mean_luminance(clear, roi.black)));
}

}  // namespace fogkit
