#pragma once

#include <Eigen/Core>

#include <array>
#include <string_view>

namespace fogkit {

template <typename Scalar>
using PlaneT = Eigen::Array<Scalar, Eigen::Dynamic, Eigen::Dynamic, Eigen::RowMajor>;
using Plane = PlaneT<double>;
using Mask = PlaneT<bool>;
using Rgb = Eigen::Array3d;

/// Rec. 709 luma weights used for every luminance computation.
inline constexpr double kLumaR = 0.2126;
inline constexpr double kLumaG = 0.7152;
inline constexpr double kLumaB = 0.0722;

/// Three-channel image stored as separate row-major planes.
template <typename Scalar>
struct BasicFrame {
    std::array<PlaneT<Scalar>, 3> channels;

    BasicFrame() = default;
    BasicFrame(Eigen::Index height, Eigen::Index width) {
        for (auto& c : channels) c.setZero(height, width);
    }
    BasicFrame(PlaneT<Scalar> r, PlaneT<Scalar> g, PlaneT<Scalar> b) : channels{std::move(r), std::move(g), std::move(b)} {}

    static BasicFrame constant(Eigen::Index height, Eigen::Index width, const Eigen::Array<Scalar, 3, 1>& rgb) {
        BasicFrame f;
        for (int c = 0; c < 3; ++c) f.channels[static_cast<std::size_t>(c)].setConstant(height, width, rgb[c]);
        return f;
    }

    Eigen::Index height() const { return channels[0].rows(); }
    Eigen::Index width() const { return channels[0].cols(); }
    PlaneT<Scalar>& operator[](std::size_t c) { return channels[c]; }
    const PlaneT<Scalar>& operator[](std::size_t c) const { return channels[c]; }

    Eigen::Array<Scalar, 3, 1> pixel(Eigen::Index y, Eigen::Index x) const {
        return {channels[0](y, x), channels[1](y, x), channels[2](y, x)};
    }
    void set_pixel(Eigen::Index y, Eigen::Index x, const Eigen::Array<Scalar, 3, 1>& rgb) {
        for (int c = 0; c < 3; ++c) channels[static_cast<std::size_t>(c)](y, x) = rgb[c];
    }

    bool operator==(const BasicFrame& o) const {
        for (std::size_t c = 0; c < 3; ++c)
            if (channels[c].rows() != o.channels[c].rows() || channels[c].cols() != o.channels[c].cols() ||
                !(channels[c] == o.channels[c]).all())
                return false;
        return true;
    }
};

using Frame = BasicFrame<double>;

/// Per-pixel metric depth in centimeters. Pixels outside `valid` carry no
/// measurement.
struct DepthMap {
    Plane depth;
    Mask valid;

    DepthMap() = default;
    explicit DepthMap(Plane d) : depth(std::move(d)), valid(depth > 0.0) {}
    DepthMap(Plane d, Mask v) : depth(std::move(d)), valid(std::move(v)) {}

    Eigen::Index height() const { return depth.rows(); }
    Eigen::Index width() const { return depth.cols(); }
};

inline constexpr Eigen::Index kMinFrameSide = 8;

template <typename Scalar>
PlaneT<Scalar> luminance(const BasicFrame<Scalar>& f) {
    return Scalar(kLumaR) * f[0] + Scalar(kLumaG) * f[1] + Scalar(kLumaB) * f[2];
}

inline double luminance(const Rgb& rgb) { return kLumaR * rgb[0] + kLumaG * rgb[1] + kLumaB * rgb[2]; }

template <typename Scalar>
BasicFrame<Scalar> clamp01(BasicFrame<Scalar> f) {
    for (auto& c : f.channels) c = c.max(Scalar(0)).min(Scalar(1));
    return f;
}

bool same_size(const Frame& a, const Frame& b);
bool in_unit_range(const Frame& f);
/// Throws DataError naming `what` unless the frame is at least 8x8 with
/// every channel value inside [0, 1].
void validate_frame(const Frame& f, std::string_view what);

}  // namespace fogkit
