#include "fogkit/metrics/metrics.hpp"

#include "fogkit/data/transform.hpp"
#include "fogkit/errors.hpp"
#include "fogkit/image/png_io.hpp"

#include <nlohmann/json.hpp>

#include <cmath>
#include <cstdio>
#include <limits>
#include <tuple>

namespace fogkit {
namespace {

void require_same(const Frame& x, const Frame& y, const char* op) {
    if (!same_size(x, y))
        throw ShapeError(std::string(op) + ": frames are " + std::to_string(x.width()) + "x" +
                         std::to_string(x.height()) + " and " + std::to_string(y.width()) + "x" +
                         std::to_string(y.height()));
}

// Valid separable correlation with the same taps along both axes.
Plane filter_valid(const Plane& p, const Eigen::ArrayXd& taps) {
    const Eigen::Index k = taps.size();
    const Eigen::Index oh = p.rows() - k + 1, ow = p.cols() - k + 1;
    Plane rows(p.rows(), ow);
    for (Eigen::Index y = 0; y < p.rows(); ++y)
        for (Eigen::Index x = 0; x < ow; ++x) {
            double s = 0.0;
            for (Eigen::Index i = 0; i < k; ++i) s += taps[i] * p(y, x + i);
            rows(y, x) = s;
        }
    Plane out(oh, ow);
    for (Eigen::Index y = 0; y < oh; ++y)
        for (Eigen::Index x = 0; x < ow; ++x) {
            double s = 0.0;
            for (Eigen::Index i = 0; i < k; ++i) s += taps[i] * rows(y + i, x);
            out(y, x) = s;
        }
    return out;
}

std::string format_number(double v) {
    if (std::isinf(v)) return v > 0 ? "inf" : "-inf";
    char buf[32];
    std::snprintf(buf, sizeof buf, "%.6f", v);
    return buf;
}

nlohmann::json json_number(double v) {
    if (std::isinf(v)) return v > 0 ? "inf" : "-inf";
    return v;
}

}  // namespace

Eigen::Index ssim_window_size(Eigen::Index height, Eigen::Index width) {
    Eigen::Index k = std::min({kSsimWindow, height, width});
    if (k % 2 == 0) --k;
    if (k < 1) throw ShapeError("ssim: empty image");
    return k;
}

Eigen::ArrayXd gaussian_taps(Eigen::Index size) {
    Eigen::ArrayXd taps(size);
    const double c = 0.5 * double(size - 1);
    for (Eigen::Index i = 0; i < size; ++i) taps[i] = std::exp(-(i - c) * (i - c) / (2 * kSsimSigma * kSsimSigma));
    return taps / taps.sum();
}

double ssim(const Plane& x, const Plane& y) {
    if (x.rows() != y.rows() || x.cols() != y.cols()) throw ShapeError("ssim: plane sizes differ");
    const Eigen::ArrayXd taps = gaussian_taps(ssim_window_size(x.rows(), x.cols()));
    const Plane mx = filter_valid(x, taps), my = filter_valid(y, taps);
    const Plane sxx = filter_valid(x * x, taps) - mx * mx;
    const Plane syy = filter_valid(y * y, taps) - my * my;
    const Plane sxy = filter_valid(x * y, taps) - mx * my;
    const Plane map = ((2 * mx * my + kSsimC1) * (2 * sxy + kSsimC2)) /
                      ((mx * mx + my * my + kSsimC1) * (sxx + syy + kSsimC2));
    return map.mean();
}

double ssim(const Frame& x, const Frame& y) {
    require_same(x, y, "ssim");
    return (ssim(x[0], y[0]) + ssim(x[1], y[1]) + ssim(x[2], y[2])) / 3.0;
}

double psnr_from_mse(double mse, double peak) {
    if (mse == 0.0) return std::numeric_limits<double>::infinity();
    return 10.0 * std::log10(peak * peak / mse);
}

double psnr(const Frame& x, const Frame& y, double peak) {
    require_same(x, y, "psnr");
    double total = 0.0;
    for (std::size_t c = 0; c < 3; ++c) total += (x[c] - y[c]).square().sum();
    return psnr_from_mse(total / (3.0 * double(x.height() * x.width())), peak);
}

double mean_abs_difference(const Frame& a, const Frame& b) {
    require_same(a, b, "mean_abs_difference");
    double total = 0.0;
    for (std::size_t c = 0; c < 3; ++c) total += (a[c] - b[c]).abs().sum();
    return total / (3.0 * double(a.height() * a.width()));
}

double flicker(std::span<const Frame> seq, std::span<const Frame> ref) {
    if (seq.size() != ref.size())
        throw ContractError("flicker: sequence lengths differ (" + std::to_string(seq.size()) + " vs " +
                            std::to_string(ref.size()) + ")");
    if (seq.size() < 2) throw ContractError("flicker: needs at least two frames");
    double total = 0.0;
    for (std::size_t t = 0; t + 1 < seq.size(); ++t)
        total += std::abs(mean_abs_difference(seq[t + 1], seq[t]) - mean_abs_difference(ref[t + 1], ref[t]));
    return total / double(seq.size() - 1);
}

MetricsReport evaluate(std::span<const EvalItem> items, const EvalOptions& options) {
    struct Acc {
        double ssim = 0.0, psnr = 0.0;
        std::size_t frames = 0;
    };
    // Key: (density, method, lighting) with lighting -1 standing for "all".
    std::map<std::tuple<Density, std::string, int>, Acc> acc;
    MetricsReport report;
    std::vector<Frame> hashed;
    auto prepare = [&](const Frame& f) { return options.size > 0 ? resize(f, options.size) : f; };

    for (const auto& item : items) {
        const std::string label = item.method + " density " + std::string(density_label(item.density)) +
                                  " lighting " + std::to_string(item.lighting);
        if (item.reference.empty()) {
            report.errors.push_back(label + ": no ground-truth partner");
            continue;
        }
        if (item.restored.size() != item.reference.size() || item.restored.empty()) {
            report.errors.push_back(label + ": " + std::to_string(item.restored.size()) +
                                    " restored frames vs " + std::to_string(item.reference.size()) + " ground truth");
            continue;
        }
        Acc one;
        bool ok = true;
        for (std::size_t i = 0; i < item.restored.size(); ++i) {
            const Frame r = prepare(item.restored[i]), g = prepare(item.reference[i]);
            if (!same_size(r, g)) {
                report.errors.push_back(label + ": frame " + std::to_string(i) + " size differs from ground truth");
                ok = false;
                break;
            }
            one.ssim += ssim(r, g);
            one.psnr += psnr(r, g);
            ++one.frames;
        }
        if (!ok) continue;
        hashed.insert(hashed.end(), item.restored.begin(), item.restored.end());
        hashed.insert(hashed.end(), item.reference.begin(), item.reference.end());
        for (int lighting : {item.lighting, -1}) {
            Acc& a = acc[{item.density, item.method, lighting}];
            a.ssim += one.ssim;
            a.psnr += one.psnr;
            a.frames += one.frames;
        }
    }

    for (const auto& [key, a] : acc) {
        const auto& [density, method, lighting] = key;
        if (lighting < 0) continue;
        MetricsRow row{method, density, lighting, a.ssim / double(a.frames), a.psnr / double(a.frames), a.frames};
        report.rows.push_back(row);
        // The pooled row follows the last lighting of its (density, method).
        auto next = std::next(acc.find(key));
        if (next == acc.end() || std::get<0>(next->first) != density || std::get<1>(next->first) != method) {
            const Acc& all = acc.at({density, method, -1});
            report.rows.push_back({method, density, std::nullopt, all.ssim / double(all.frames),
                                   all.psnr / double(all.frames), all.frames});
        }
    }
    report.fingerprint = fingerprint(hashed);
    return report;
}

std::string fingerprint(std::span<const Frame> frames) {
    std::uint64_t h = 0xcbf29ce484222325ull;
    auto mix = [&h](unsigned char byte) {
        h ^= byte;
        h *= 0x100000001b3ull;
    };
    for (const auto& f : frames) {
        for (int shift = 0; shift < 32; shift += 8) {
            mix(static_cast<unsigned char>(f.height() >> shift));
            mix(static_cast<unsigned char>(f.width() >> shift));
        }
        for (const auto& c : f.channels)
            for (Eigen::Index i = 0; i < c.size(); ++i)
                mix(static_cast<unsigned char>(std::lround(quantize8(c.data()[i]) * 255.0)));
    }
    char buf[17];
    std::snprintf(buf, sizeof buf, "%016llx", static_cast<unsigned long long>(h));
    return buf;
}

std::string to_json(const MetricsReport& report) {
    nlohmann::ordered_json j;
    j["rows"] = nlohmann::ordered_json::array();
    for (const auto& r : report.rows) {
        nlohmann::ordered_json row;
        row["method"] = r.method;
        row["density"] = density_label(r.density);
        row["lighting"] = r.lighting ? nlohmann::ordered_json(*r.lighting) : nlohmann::ordered_json("all");
        row["ssim"] = json_number(r.ssim);
        row["psnr"] = json_number(r.psnr);
        row["frames"] = r.frames;
        j["rows"].push_back(row);
    }
    j["errors"] = report.errors;
    j["config"] = report.config;
    j["fingerprint"] = report.fingerprint;
    return j.dump(2) + "\n";
}

std::string to_csv(const MetricsReport& report) {
    std::string out = "method,density,lighting,ssim,psnr,frames\n";
    for (const auto& r : report.rows)
        out += r.method + "," + std::string(density_label(r.density)) + "," +
               (r.lighting ? std::to_string(*r.lighting) : std::string("all")) + "," + format_number(r.ssim) + "," +
               format_number(r.psnr) + "," + std::to_string(r.frames) + "\n";
    return out;
}

}  // namespace fogkit
