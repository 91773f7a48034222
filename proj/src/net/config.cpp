#include "fogkit/errors.hpp"
#include "fogkit/net/tcvd.hpp"

#include <cstdio>
#include <sstream>

namespace fogkit::net {
namespace {

std::string format_double(double v) {
    char buf[40];
    std::snprintf(buf, sizeof buf, "%.17g", v);
    return buf;
}

}  // namespace

TcvdConfig TcvdConfig::paper() { return {}; }

TcvdConfig TcvdConfig::desk() {
    TcvdConfig c;
    c.input_size = 64;
    c.encoder_filters = {8, 16, 32, 64};
    c.heads = 2;
    return c;
}

void TcvdConfig::validate() const {
    if (tpformer_stages < 1) throw ConfigError("tcvd: tpformer_stages must be >= 1");
    if (levels() != tpformer_stages + 1)
        throw ConfigError("tcvd: encoder_filters needs tpformer_stages + 1 = " + std::to_string(tpformer_stages + 1) +
                          " entries, got " + std::to_string(levels()));
    for (Index f : encoder_filters)
        if (f < 1) throw ConfigError("tcvd: encoder filter counts must be positive");
    if (heads < 1) throw ConfigError("tcvd: heads must be >= 1");
    for (Index s = 0; s < tpformer_stages; ++s)
        if (encoder_filters[static_cast<std::size_t>(s)] % heads != 0)
            throw ConfigError("tcvd: stage " + std::to_string(s) + " width " +
                              std::to_string(encoder_filters[static_cast<std::size_t>(s)]) +
                              " is not divisible by heads = " + std::to_string(heads));
    if (triplet_len != 3) throw ConfigError("tcvd: triplet_len must be 3");
    if (!(loss_a >= 0.0 && loss_b >= 0.0) || !(loss_a + loss_b > 0.0))
        throw ConfigError("tcvd: loss_a and loss_b must be >= 0 with a positive sum");
    const Index factor = Index{1} << levels();
    if (input_size < factor || input_size % factor != 0)
        throw ConfigError("tcvd: input_size must be a positive multiple of " + std::to_string(factor) + ", got " +
                          std::to_string(input_size));
}

std::string TcvdConfig::echo() const {
    std::string filters;
    for (Index f : encoder_filters) filters += (filters.empty() ? "" : ",") + std::to_string(f);
    return "input_size=" + std::to_string(input_size) + "\nencoder_filters=" + filters +
           "\ntpformer_stages=" + std::to_string(tpformer_stages) + "\nheads=" + std::to_string(heads) +
           "\ntriplet_len=" + std::to_string(triplet_len) + "\nloss_a=" + format_double(loss_a) +
           "\nloss_b=" + format_double(loss_b) + "\n";
}

TcvdConfig TcvdConfig::parse_echo(std::string_view text) {
    TcvdConfig c;
    std::istringstream in{std::string(text)};
    std::string line;
    try {
        while (std::getline(in, line)) {
            if (line.empty()) continue;
            const auto eq = line.find('=');
            if (eq == std::string::npos) throw ConfigError("tcvd config: malformed line '" + line + "'");
            const std::string key = line.substr(0, eq), value = line.substr(eq + 1);
            if (key == "input_size") c.input_size = std::stoll(value);
            else if (key == "tpformer_stages") c.tpformer_stages = std::stoll(value);
            else if (key == "heads") c.heads = std::stoll(value);
            else if (key == "triplet_len") c.triplet_len = std::stoll(value);
            else if (key == "loss_a") c.loss_a = std::stod(value);
            else if (key == "loss_b") c.loss_b = std::stod(value);
            else if (key == "encoder_filters") {
                c.encoder_filters.clear();
                std::istringstream list(value);
                std::string item;
                while (std::getline(list, item, ',')) c.encoder_filters.push_back(std::stoll(item));
            } else {
                throw ConfigError("tcvd config: unknown key '" + key + "'");
            }
        }
    } catch (const std::logic_error& e) {
        if (dynamic_cast<const ConfigError*>(&e)) throw;
        throw ConfigError("tcvd config: bad value in '" + line + "'");
    }
    return c;
}

}  // namespace fogkit::net
