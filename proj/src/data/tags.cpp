#include "fogkit/data/tags.hpp"

#include "fogkit/errors.hpp"

#include <limits>

namespace fogkit {

double density_anchor(Density d) {
    switch (d) {
        case Density::dense: return 0.015;
        case Density::medium: return 0.05;
        case Density::light: return 0.15;
        case Density::clear: break;
    }
    return std::numeric_limits<double>::quiet_NaN();
}

std::string_view density_label(Density d) {
    switch (d) {
        case Density::dense: return "0.015";
        case Density::medium: return "0.05";
        case Density::light: return "0.15";
        case Density::clear: break;
    }
    return "none";
}

Density parse_density(std::string_view label) {
    for (Density d : {Density::clear, Density::dense, Density::medium, Density::light})
        if (label == density_label(d)) return d;
    throw DataError("unknown density label '" + std::string(label) + "' (expected 0.015, 0.05, 0.15 or none)");
}

void validate_tag(const AcquisitionTag& tag) {
    if (tag.lighting < 0 || tag.lighting >= kLightingConditions)
        throw DataError("lighting index " + std::to_string(tag.lighting) + " outside [0, 6)");
    if (tag.position < 0) throw DataError("negative position index " + std::to_string(tag.position));
}

}  // namespace fogkit
