#include "fogkit/dcp/dcp.hpp"

#include "fogkit/errors.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>

namespace fogkit {
namespace {

// Sliding minimum along rows (axis 1) or columns (axis 0), edge-replicated.
Plane min_filter_1d(const Plane& in, Eigen::Index radius, int axis) {
    const Eigen::Index h = in.rows(), w = in.cols();
    Plane out(h, w);
    for (Eigen::Index y = 0; y < h; ++y)
        for (Eigen::Index x = 0; x < w; ++x) {
            double m = in(y, x);
            for (Eigen::Index d = -radius; d <= radius; ++d) {
                const Eigen::Index yy = axis == 0 ? std::clamp<Eigen::Index>(y + d, 0, h - 1) : y;
                const Eigen::Index xx = axis == 1 ? std::clamp<Eigen::Index>(x + d, 0, w - 1) : x;
                m = std::min(m, in(yy, xx));
            }
            out(y, x) = m;
        }
    return out;
}

void check_size(const Plane& t, const Frame& f, const char* op) {
    if (t.rows() != f.height() || t.cols() != f.width())
        throw ShapeError(std::string(op) + ": transmission map size does not match the frame");
}

}  // namespace

void validate(const DcpParams& p) {
    if (p.patch < 1 || p.patch % 2 == 0) throw ContractError("dcp: patch must be odd and >= 1");
    if (!(p.omega >= 0.0 && p.omega <= 1.0)) throw ContractError("dcp: omega must lie in [0, 1]");
    if (!(p.t0 > 0.0 && p.t0 <= 1.0)) throw ContractError("dcp: t0 must lie in (0, 1]");
    if (!(p.top_fraction > 0.0 && p.top_fraction <= 1.0)) throw ContractError("dcp: top_fraction must lie in (0, 1]");
    if (p.guided_radius < 0) throw ContractError("dcp: guided_radius must be >= 0");
    if (!(p.guided_eps > 0.0)) throw ContractError("dcp: guided_eps must be positive");
}

Plane dark_channel(const Frame& frame, Eigen::Index patch) {
    if (patch < 1 || patch % 2 == 0) throw ContractError("dark_channel: patch must be odd, got " + std::to_string(patch));
    const Plane channel_min = frame[0].min(frame[1]).min(frame[2]);
    const Eigen::Index r = patch / 2;
    if (r == 0) return channel_min;
    return min_filter_1d(min_filter_1d(channel_min, r, 1), r, 0);
}

Rgb estimate_airlight(const Frame& frame, const Plane& dark, double top_fraction, double floor) {
    if (!(top_fraction > 0.0 && top_fraction <= 1.0)) throw ContractError("estimate_airlight: top_fraction must lie in (0, 1]");
    if (dark.rows() != frame.height() || dark.cols() != frame.width())
        throw ShapeError("estimate_airlight: dark channel size does not match the frame");
    const Eigen::Index n = dark.size();
    const auto count = std::clamp<Eigen::Index>(
        static_cast<Eigen::Index>(std::ceil(top_fraction * static_cast<double>(n))), 1, n);
    std::vector<Eigen::Index> order(static_cast<std::size_t>(n));
    std::iota(order.begin(), order.end(), Eigen::Index{0});
    // Ties broken by raster index so the selection is reproducible.
    std::partial_sort(order.begin(), order.begin() + count, order.end(), [&](Eigen::Index a, Eigen::Index b) {
        const double da = dark.data()[a], db = dark.data()[b];
        return da != db ? da > db : a < b;
    });
    Rgb best = Rgb::Zero();
    double best_lum = -1.0;
    for (Eigen::Index k = 0; k < count; ++k) {
        const Eigen::Index i = order[static_cast<std::size_t>(k)];
        const Rgb px = frame.pixel(i / frame.width(), i % frame.width());
        if (const double l = luminance(px); l > best_lum) {
            best_lum = l;
            best = px;
        }
    }
    return best.max(floor);
}

Plane estimate_transmission(const Frame& frame, const Rgb& airlight, double omega, Eigen::Index patch, double t0) {
    if (!(airlight > 0.0).all()) throw ContractError("estimate_transmission: airlight channels must be positive");
    Frame normalized;
    for (std::size_t c = 0; c < 3; ++c) normalized[c] = frame[c] / airlight[static_cast<Eigen::Index>(c)];
    return (1.0 - omega * dark_channel(normalized, patch)).max(t0).min(1.0);
}

Plane box_filter(const Plane& p, Eigen::Index radius) {
    const Eigen::Index h = p.rows(), w = p.cols();
    // Summed-area table with a zero border row and column.
    Plane sat = Plane::Zero(h + 1, w + 1);
    for (Eigen::Index y = 0; y < h; ++y)
        for (Eigen::Index x = 0; x < w; ++x) sat(y + 1, x + 1) = p(y, x) + sat(y, x + 1) + sat(y + 1, x) - sat(y, x);
    Plane out(h, w);
    for (Eigen::Index y = 0; y < h; ++y) {
        const Eigen::Index y0 = std::max<Eigen::Index>(y - radius, 0), y1 = std::min(y + radius + 1, h);
        for (Eigen::Index x = 0; x < w; ++x) {
            const Eigen::Index x0 = std::max<Eigen::Index>(x - radius, 0), x1 = std::min(x + radius + 1, w);
            const double s = sat(y1, x1) - sat(y0, x1) - sat(y1, x0) + sat(y0, x0);
            out(y, x) = s / static_cast<double>((y1 - y0) * (x1 - x0));
        }
    }
    return out;
}

Plane refine_transmission(const Plane& t, const Frame& guide, Eigen::Index radius, double eps, double t0) {
    check_size(t, guide, "refine_transmission");
    if (!(eps > 0.0)) throw ContractError("refine_transmission: eps must be positive");
    const Plane g = luminance(guide);
    const Plane mean_g = box_filter(g, radius);
    const Plane mean_t = box_filter(t, radius);
    const Plane var_g = box_filter(g * g, radius) - mean_g * mean_g;
    const Plane cov = box_filter(g * t, radius) - mean_g * mean_t;
    const Plane a = cov / (var_g + eps);
    const Plane b = mean_t - a * mean_g;
    return (box_filter(a, radius) * g + box_filter(b, radius)).max(t0).min(1.0);
}

Frame recover(const Frame& frame, const Plane& t, const Rgb& airlight, double t0) {
    check_size(t, frame, "recover");
    const Plane denom = t.max(t0);
    Frame out;
    for (std::size_t c = 0; c < 3; ++c) {
        const double a = airlight[static_cast<Eigen::Index>(c)];
        out[c] = ((frame[c] - a) / denom + a).max(0.0).min(1.0);
    }
    return out;
}

Frame dcp_defog(const Frame& frame, const DcpParams& p) {
    validate(p);
    const Rgb a = estimate_airlight(frame, dark_channel(frame, p.patch), p.top_fraction, p.airlight_floor);
    const Plane t = estimate_transmission(frame, a, p.omega, p.patch, p.t0);
    return recover(frame, refine_transmission(t, frame, p.guided_radius, p.guided_eps, p.t0), a, p.t0);
}

std::vector<Frame> dcp_defog_video(std::span<const Frame> frames, const DcpParams& params) {
    validate(params);
    std::vector<Frame> out;
    out.reserve(frames.size());
    for (std::size_t i = 0; i < frames.size(); ++i) {
        try {
            out.push_back(dcp_defog(frames[i], params));
        } catch (const std::exception& e) {
            throw DataError("dcp: frame " + std::to_string(i) + ": " + e.what());
        }
    }
    return out;
}

}  // namespace fogkit
