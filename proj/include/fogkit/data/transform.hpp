#pragma once

#include "fogkit/image/frame.hpp"

#include <cstdint>
#include <utility>

namespace fogkit {

/// Bilinear resample to height x width. Corner pixels map onto corner pixels;
/// output is clamped to [0, 1].
Frame resize(const Frame& frame, Eigen::Index height, Eigen::Index width);
inline Frame resize(const Frame& frame, Eigen::Index size) { return resize(frame, size, size); }
Plane resize(const Plane& plane, Eigen::Index height, Eigen::Index width);

/// An element of the dihedral group of the square: optional horizontal flip
/// followed by `quarter_turns` counter-clockwise 90 degree rotations.
struct DihedralTransform {
    bool flip = false;
    int quarter_turns = 0;  ///< 0..3

    DihedralTransform inverse() const;
    bool operator==(const DihedralTransform&) const = default;
};

/// Draws flip (p = 0.5) and quarter_turns (uniform in 0..3) from the seed.
DihedralTransform sample_dihedral(std::uint64_t seed);

/// Throws ContractError for an odd number of turns on a non-square frame.
Frame apply(const DihedralTransform& tf, const Frame& frame);
Plane apply(const DihedralTransform& tf, const Plane& plane);

/// Applies the same sampled transform to a (foggy, clear) pair.
std::pair<Frame, Frame> augment(const std::pair<Frame, Frame>& pair, std::uint64_t seed);

}  // namespace fogkit
