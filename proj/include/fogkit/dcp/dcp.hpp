#pragma once

#include "fogkit/image/frame.hpp"

#include <span>
#include <vector>

namespace fogkit {

struct DcpParams {
    Eigen::Index patch = 15;
    double omega = 0.95;
    double t0 = 0.1;
    double top_fraction = 0.001;
    Eigen::Index guided_radius = 15;
    double guided_eps = 1e-3;
    double airlight_floor = 0.05;
};

/// Throws ContractError for an even or non-positive patch, omega outside
/// [0, 1], t0 outside (0, 1], top_fraction outside (0, 1], a negative radius
/// or a non-positive eps.
void validate(const DcpParams& params);

/// Minimum over channels and over a patch x patch window, with edge
/// replication at the borders.
Plane dark_channel(const Frame& frame, Eigen::Index patch);

/// Among the brightest top_fraction of dark-channel pixels, the frame pixel
/// with the highest luminance, each channel floored at `floor`.
Rgb estimate_airlight(const Frame& frame, const Plane& dark, double top_fraction = 0.001, double floor = 0.05);

/// 1 - omega * dark_channel(I / A), clamped to [t0, 1].
Plane estimate_transmission(const Frame& frame, const Rgb& airlight, double omega = 0.95, Eigen::Index patch = 15,
                            double t0 = 0.1);

/// Mean over the (2 radius + 1)^2 window clipped to the plane.
Plane box_filter(const Plane& plane, Eigen::Index radius);

/// Guided filter of `t` steered by the luminance of `guide`, clamped to
/// [t0, 1].
Plane refine_transmission(const Plane& t, const Frame& guide, Eigen::Index radius = 15, double eps = 1e-3,
                          double t0 = 0.1);

/// J = (I - A) / max(t, t0) + A per channel, clamped to [0, 1].
Frame recover(const Frame& frame, const Plane& t, const Rgb& airlight, double t0 = 0.1);

Frame dcp_defog(const Frame& frame, const DcpParams& params = {});

/// Frame-by-frame defogging. Errors are rethrown as DataError naming the
/// frame index.
std::vector<Frame> dcp_defog_video(std::span<const Frame> frames, const DcpParams& params = {});

}  // namespace fogkit
