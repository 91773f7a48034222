#include "fogkit/image/frame.hpp"

#include "fogkit/errors.hpp"

#include <string>

namespace fogkit {

bool same_size(const Frame& a, const Frame& b) { return a.height() == b.height() && a.width() == b.width(); }

bool in_unit_range(const Frame& f) {
    for (const auto& c : f.channels)
        if (c.size() && (c.minCoeff() < 0.0 || c.maxCoeff() > 1.0 || !c.isFinite().all())) return false;
    return true;
}

void validate_frame(const Frame& f, std::string_view what) {
    if (f.height() < kMinFrameSide || f.width() < kMinFrameSide)
        throw DataError(std::string(what) + ": frame " + std::to_string(f.width()) + "x" + std::to_string(f.height()) +
                        " is smaller than 8x8");
    for (const auto& c : f.channels)
        if (c.rows() != f.height() || c.cols() != f.width())
            throw DataError(std::string(what) + ": channel planes differ in size");
    if (!in_unit_range(f)) throw DataError(std::string(what) + ": channel values outside [0, 1]");
}

}  // namespace fogkit
