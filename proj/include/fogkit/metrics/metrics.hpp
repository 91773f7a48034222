#pragma once

#include "fogkit/data/tags.hpp"
#include "fogkit/image/frame.hpp"

#include <cstdint>
#include <map>
#include <optional>
#include <span>
#include <string>
#include <vector>

namespace fogkit {

inline constexpr Eigen::Index kSsimWindow = 11;
inline constexpr double kSsimSigma = 1.5;
inline constexpr double kSsimC1 = 0.01 * 0.01;
inline constexpr double kSsimC2 = 0.03 * 0.03;

/// Side of the SSIM window for an h x w image: 11, shrunk to the largest odd
/// size that fits when the image is smaller.
Eigen::Index ssim_window_size(Eigen::Index height, Eigen::Index width);

/// Normalized 1-D Gaussian taps (sigma 1.5) of the given odd length.
Eigen::ArrayXd gaussian_taps(Eigen::Index size);

/// Mean SSIM of one channel over all valid window positions.
double ssim(const Plane& x, const Plane& y);
/// Mean of the three per-channel SSIMs.
double ssim(const Frame& x, const Frame& y);

double psnr_from_mse(double mse, double peak = 1.0);
/// 10 log10(peak^2 / MSE); +inf when the frames are identical.
double psnr(const Frame& x, const Frame& y, double peak = 1.0);

double mean_abs_difference(const Frame& a, const Frame& b);

/// Mean over t of | mad(seq[t+1], seq[t]) - mad(ref[t+1], ref[t]) |.
double flicker(std::span<const Frame> seq, std::span<const Frame> ref);

/// One restored video and its ground truth.
struct EvalItem {
    std::string method;
    Density density = Density::clear;
    int lighting = 0;
    std::vector<Frame> restored;
    std::vector<Frame> reference;
};

struct MetricsRow {
    std::string method;
    Density density = Density::clear;
    std::optional<int> lighting;  ///< empty for the pooled "all" row
    double ssim = 0.0;
    double psnr = 0.0;
    std::size_t frames = 0;
};

struct MetricsReport {
    std::vector<MetricsRow> rows;
    std::vector<std::string> errors;
    std::map<std::string, std::string> config;
    std::string fingerprint;
};

struct EvalOptions {
    Eigen::Index size = 224;  ///< frames resized to size x size; 0 keeps them as is
};

/// Per-frame SSIM/PSNR averaged per (method, density, lighting) and per
/// (method, density) over all lightings. Items without a matching reference
/// are listed in `errors` and left out. Rows are sorted by density, method,
/// then lighting with the pooled row last.
MetricsReport evaluate(std::span<const EvalItem> items, const EvalOptions& options = {});

/// FNV-1a 64-bit hash over the 8-bit quantized pixels, as 16 hex digits.
std::string fingerprint(std::span<const Frame> frames);

std::string to_json(const MetricsReport& report);
/// Columns: method,density,lighting,ssim,psnr,frames.
std::string to_csv(const MetricsReport& report);

}  // namespace fogkit
