#include "fogkit/data/transform.hpp"

#include "fogkit/errors.hpp"

#include <cmath>
#include <random>

namespace fogkit {

Plane resize(const Plane& plane, Eigen::Index height, Eigen::Index width) {
    if (height < 1 || width < 1) throw ContractError("resize: target size must be positive");
    const Eigen::Index h = plane.rows(), w = plane.cols();
    if (h < 1 || w < 1) throw ContractError("resize: empty input");
    const double sy = height > 1 ? double(h - 1) / double(height - 1) : 0.0;
    const double sx = width > 1 ? double(w - 1) / double(width - 1) : 0.0;
    Plane out(height, width);
    for (Eigen::Index y = 0; y < height; ++y) {
        const double fy = y * sy;
        const Eigen::Index y0 = std::min<Eigen::Index>(static_cast<Eigen::Index>(fy), h - 1);
        const Eigen::Index y1 = std::min<Eigen::Index>(y0 + 1, h - 1);
        const double ay = fy - double(y0);
        for (Eigen::Index x = 0; x < width; ++x) {
            const double fx = x * sx;
            const Eigen::Index x0 = std::min<Eigen::Index>(static_cast<Eigen::Index>(fx), w - 1);
            const Eigen::Index x1 = std::min<Eigen::Index>(x0 + 1, w - 1);
            const double ax = fx - double(x0);
            const double top = plane(y0, x0) * (1 - ax) + plane(y0, x1) * ax;
            const double bottom = plane(y1, x0) * (1 - ax) + plane(y1, x1) * ax;
            out(y, x) = top * (1 - ay) + bottom * ay;
        }
    }
    return out;
}

Frame resize(const Frame& frame, Eigen::Index height, Eigen::Index width) {
    Frame out;
    for (std::size_t c = 0; c < 3; ++c) out[c] = resize(frame[c], height, width).max(0.0).min(1.0);
    return out;
}

DihedralTransform DihedralTransform::inverse() const {
    // (R^k F)^-1 = F R^-k = R^k F when flipped.
    if (flip) return *this;
    return {false, (4 - quarter_turns) % 4};
}

DihedralTransform sample_dihedral(std::uint64_t seed) {
    std::mt19937_64 rng(seed);
    const std::uint64_t bits = rng();
    return {(bits >> 63) != 0, static_cast<int>((bits >> 61) & 3u)};
}

Plane apply(const DihedralTransform& tf, const Plane& plane) {
    const int k = ((tf.quarter_turns % 4) + 4) % 4;
    if (k % 2 == 1 && plane.rows() != plane.cols())
        throw ContractError("augment: a 90 degree rotation needs a square frame, got " + std::to_string(plane.cols()) +
                            "x" + std::to_string(plane.rows()));
    Plane p = tf.flip ? Plane(plane.rowwise().reverse()) : plane;
    for (int i = 0; i < k; ++i) p = Plane(p.transpose().colwise().reverse());
    return p;
}

Frame apply(const DihedralTransform& tf, const Frame& frame) {
    Frame out;
    for (std::size_t c = 0; c < 3; ++c) out[c] = apply(tf, frame[c]);
    return out;
}

std::pair<Frame, Frame> augment(const std::pair<Frame, Frame>& pair, std::uint64_t seed) {
    if (!same_size(pair.first, pair.second)) throw ShapeError("augment: foggy and clear frames differ in size");
    const DihedralTransform tf = sample_dihedral(seed);
    return {apply(tf, pair.first), apply(tf, pair.second)};
}

}  // namespace fogkit
