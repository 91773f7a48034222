#pragma once

#include "fogkit/image/frame.hpp"

#include <filesystem>

namespace fogkit {

/// 8-bit RGB PNG, normalized by 1/255.
Frame read_png(const std::filesystem::path& path);
/// Quantizes to 8 bits with round-to-nearest after clamping to [0, 1].
void write_png(const std::filesystem::path& path, const Frame& frame);

/// 16-bit grayscale PNG whose values are centimeters; 0 marks invalid.
DepthMap read_depth_png(const std::filesystem::path& path);
void write_depth_png(const std::filesystem::path& path, const DepthMap& depth);

/// Value a channel takes after an 8-bit write/read round trip.
double quantize8(double v);

}  // namespace fogkit
