#include "fogkit/image/png_io.hpp"

#include "fogkit/errors.hpp"

#include <png.h>

#include <algorithm>
#include <cmath>
#include <csetjmp>
#include <cstdio>
#include <memory>
#include <vector>

namespace fogkit {
namespace {

struct FileCloser {
    void operator()(std::FILE* f) const {
        if (f) std::fclose(f);
    }
};
using FilePtr = std::unique_ptr<std::FILE, FileCloser>;

FilePtr open_file(const std::filesystem::path& path, const char* mode) {
    FilePtr f(std::fopen(path.c_str(), mode));
    if (!f) throw DataError("cannot open " + path.string());
    return f;
}

// Decoded image. Lives on the heap so its state stays well-defined if libpng
// longjmps out of a read.
struct Decoded {
    png_uint_32 width = 0, height = 0;
    int channels = 0;
    int bit_depth = 0;
    std::vector<unsigned char> bytes;
    std::vector<png_bytep> rows;
};

// libpng reports through these; errors still unwind through setjmp.
void on_error(png_structp png, png_const_charp) { png_longjmp(png, 1); }
void on_warning(png_structp, png_const_charp) {}

enum class Target { rgb8, gray16 };

std::unique_ptr<Decoded> decode(const std::filesystem::path& path, Target target) {
    FilePtr file = open_file(path, "rb");
    auto out = std::make_unique<Decoded>();
    png_structp png = png_create_read_struct(PNG_LIBPNG_VER_STRING, nullptr, on_error, on_warning);
    if (!png) throw DataError("libpng: out of memory reading " + path.string());
    png_infop info = png_create_info_struct(png);
    if (!info) {
        png_destroy_read_struct(&png, nullptr, nullptr);
        throw DataError("libpng: out of memory reading " + path.string());
    }
    if (setjmp(png_jmpbuf(png))) {
        png_destroy_read_struct(&png, &info, nullptr);
        throw DataError("not a readable PNG: " + path.string());
    }
    png_init_io(png, file.get());
    png_read_info(png, info);

    const int color = png_get_color_type(png, info);
    const int depth = png_get_bit_depth(png, info);
    if (color == PNG_COLOR_TYPE_PALETTE) png_set_palette_to_rgb(png);
    if (color == PNG_COLOR_TYPE_GRAY && depth < 8) png_set_expand_gray_1_2_4_to_8(png);
    if (png_get_valid(png, info, PNG_INFO_tRNS)) png_set_tRNS_to_alpha(png);
    if (color & PNG_COLOR_MASK_ALPHA) png_set_strip_alpha(png);
    if (target == Target::rgb8) {
        if (depth == 16) png_set_strip_16(png);
        if (color == PNG_COLOR_TYPE_GRAY || color == PNG_COLOR_TYPE_GRAY_ALPHA) png_set_gray_to_rgb(png);
    } else if (color != PNG_COLOR_TYPE_GRAY && color != PNG_COLOR_TYPE_GRAY_ALPHA) {
        png_destroy_read_struct(&png, &info, nullptr);
        throw DataError("depth map must be grayscale: " + path.string());
    }
    png_read_update_info(png, info);

    out->width = png_get_image_width(png, info);
    out->height = png_get_image_height(png, info);
    out->channels = png_get_channels(png, info);
    out->bit_depth = png_get_bit_depth(png, info);
    const std::size_t stride = png_get_rowbytes(png, info);
    out->bytes.resize(stride * out->height);
    out->rows.resize(out->height);
    for (png_uint_32 y = 0; y < out->height; ++y) out->rows[y] = out->bytes.data() + y * stride;
    png_read_image(png, out->rows.data());
    png_read_end(png, nullptr);
    png_destroy_read_struct(&png, &info, nullptr);
    return out;
}

struct Encoded {
    std::vector<unsigned char> bytes;
    std::vector<png_bytep> rows;
};

void encode(const std::filesystem::path& path, png_uint_32 width, png_uint_32 height, int bit_depth, int color,
            std::unique_ptr<Encoded> data) {
    FilePtr file = open_file(path, "wb");
    png_structp png = png_create_write_struct(PNG_LIBPNG_VER_STRING, nullptr, on_error, on_warning);
    if (!png) throw DataError("libpng: out of memory writing " + path.string());
    png_infop info = png_create_info_struct(png);
    if (!info) {
        png_destroy_write_struct(&png, nullptr);
        throw DataError("libpng: out of memory writing " + path.string());
    }
    if (setjmp(png_jmpbuf(png))) {
        png_destroy_write_struct(&png, &info);
        throw DataError("failed writing PNG " + path.string());
    }
    png_init_io(png, file.get());
    png_set_IHDR(png, info, width, height, bit_depth, color, PNG_INTERLACE_NONE, PNG_COMPRESSION_TYPE_DEFAULT,
                 PNG_FILTER_TYPE_DEFAULT);
    png_write_info(png, info);
    png_write_image(png, data->rows.data());
    png_write_end(png, nullptr);
    png_destroy_write_struct(&png, &info);
}

unsigned char to_byte(double v) { return static_cast<unsigned char>(std::lround(std::clamp(v, 0.0, 1.0) * 255.0)); }

}  // namespace

double quantize8(double v) { return to_byte(v) / 255.0; }

Frame read_png(const std::filesystem::path& path) {
    const auto img = decode(path, Target::rgb8);
    Frame f(static_cast<Eigen::Index>(img->height), static_cast<Eigen::Index>(img->width));
    for (png_uint_32 y = 0; y < img->height; ++y)
        for (png_uint_32 x = 0; x < img->width; ++x)
            for (std::size_t c = 0; c < 3; ++c) f[c](y, x) = img->rows[y][x * 3 + c] / 255.0;
    return f;
}

void write_png(const std::filesystem::path& path, const Frame& frame) {
    auto data = std::make_unique<Encoded>();
    const auto w = static_cast<std::size_t>(frame.width()), h = static_cast<std::size_t>(frame.height());
    data->bytes.resize(w * h * 3);
    for (std::size_t y = 0; y < h; ++y) {
        for (std::size_t x = 0; x < w; ++x)
            for (std::size_t c = 0; c < 3; ++c)
                data->bytes[(y * w + x) * 3 + c] =
                    to_byte(frame[c](static_cast<Eigen::Index>(y), static_cast<Eigen::Index>(x)));
        data->rows.push_back(data->bytes.data() + y * w * 3);
    }
    encode(path, static_cast<png_uint_32>(w), static_cast<png_uint_32>(h), 8, PNG_COLOR_TYPE_RGB, std::move(data));
}

DepthMap read_depth_png(const std::filesystem::path& path) {
    const auto img = decode(path, Target::gray16);
    Plane depth(static_cast<Eigen::Index>(img->height), static_cast<Eigen::Index>(img->width));
    for (png_uint_32 y = 0; y < img->height; ++y)
        for (png_uint_32 x = 0; x < img->width; ++x) {
            const unsigned char* p = img->rows[y];
            depth(y, x) = img->bit_depth == 16 ? static_cast<double>((p[2 * x] << 8) | p[2 * x + 1]) : p[x];
        }
    return DepthMap(std::move(depth));
}

void write_depth_png(const std::filesystem::path& path, const DepthMap& map) {
    auto data = std::make_unique<Encoded>();
    const auto w = static_cast<std::size_t>(map.width()), h = static_cast<std::size_t>(map.height());
    data->bytes.resize(w * h * 2);
    for (std::size_t y = 0; y < h; ++y) {
        for (std::size_t x = 0; x < w; ++x) {
            const auto yy = static_cast<Eigen::Index>(y), xx = static_cast<Eigen::Index>(x);
            const double cm = map.valid(yy, xx) ? std::clamp(std::round(map.depth(yy, xx)), 1.0, 65535.0) : 0.0;
            const auto v = static_cast<unsigned>(cm);
            data->bytes[(y * w + x) * 2] = static_cast<unsigned char>(v >> 8);
            data->bytes[(y * w + x) * 2 + 1] = static_cast<unsigned char>(v & 0xff);
        }
        data->rows.push_back(data->bytes.data() + y * w * 2);
    }
    encode(path, static_cast<png_uint_32>(w), static_cast<png_uint_32>(h), 16, PNG_COLOR_TYPE_GRAY, std::move(data));
}

}  // namespace fogkit
