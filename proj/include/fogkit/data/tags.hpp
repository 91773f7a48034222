#pragma once

#include <array>
#include <compare>
#include <string>
#include <string_view>

namespace fogkit {

/// Fog density of a frame, keyed by the black & white panel contrast it was
/// acquired at. Lower contrast means denser fog.
enum class Density { clear, dense, medium, light };

inline constexpr std::array<Density, 3> kFogDensities{Density::dense, Density::medium, Density::light};
inline constexpr int kLightingConditions = 6;

/// Panel contrast of each fogged density: 0.015, 0.05, 0.15.
double density_anchor(Density d);
/// "0.015", "0.05", "0.15", or "none" for clear frames.
std::string_view density_label(Density d);
/// Inverse of density_label; throws DataError on anything else.
Density parse_density(std::string_view label);

struct AcquisitionTag {
    int position = 0;  ///< robot (car) position index
    int lighting = 0;  ///< 0 heterogeneous, 1..5 white LED
    Density density = Density::clear;

    auto operator<=>(const AcquisitionTag&) const = default;
};

/// Throws DataError if lighting is outside [0, 6) or position is negative.
void validate_tag(const AcquisitionTag& tag);

}  // namespace fogkit
