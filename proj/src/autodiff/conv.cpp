#include "fogkit/autodiff/ops.hpp"

#include "fogkit/errors.hpp"

namespace fogkit::ad {
namespace {

using ConstMat = Eigen::Map<const RowMatrix>;

// Geometry of a forward convolution from an [N,H,W,C] image to an
// [N,Ho,Wo,Cout] map.
struct ConvGeometry {
    Index n, h, w, c;
    Index kh, kw, stride;
    Index out_h, out_w;
    Index pad_top, pad_left;

    Index rows() const { return n * out_h * out_w; }
    Index cols() const { return kh * kw * c; }
};

ConvGeometry make_geometry(const Shape& image, Index kh, Index kw, Index stride, Padding padding) {
    ConvGeometry g{image[0], image[1], image[2], image[3], kh, kw, stride, 0, 0, 0, 0};
    if (padding == Padding::same) {
        g.out_h = (g.h + stride - 1) / stride;
        g.out_w = (g.w + stride - 1) / stride;
        g.pad_top = std::max<Index>((g.out_h - 1) * stride + kh - g.h, 0) / 2;
        g.pad_left = std::max<Index>((g.out_w - 1) * stride + kw - g.w, 0) / 2;
    } else {
        if (g.h < kh || g.w < kw)
            throw ShapeError("conv2d: valid padding needs input at least " + std::to_string(kh) + "x" +
                             std::to_string(kw) + ", got " + std::to_string(g.h) + "x" + std::to_string(g.w));
        g.out_h = (g.h - kh) / stride + 1;
        g.out_w = (g.w - kw) / stride + 1;
    }
    return g;
}

RowMatrix im2col(const ConvGeometry& g, const Vector& image) {
    RowMatrix col = RowMatrix::Zero(g.rows(), g.cols());
    for (Index b = 0; b < g.n; ++b)
        for (Index oy = 0; oy < g.out_h; ++oy)
            for (Index ox = 0; ox < g.out_w; ++ox) {
                const Index row = (b * g.out_h + oy) * g.out_w + ox;
                for (Index ky = 0; ky < g.kh; ++ky) {
                    const Index y = oy * g.stride - g.pad_top + ky;
                    if (y < 0 || y >= g.h) continue;
                    for (Index kx = 0; kx < g.kw; ++kx) {
                        const Index x = ox * g.stride - g.pad_left + kx;
                        if (x < 0 || x >= g.w) continue;
                        col.row(row).segment((ky * g.kw + kx) * g.c, g.c) =
                            image.segment(((b * g.h + y) * g.w + x) * g.c, g.c).transpose();
                    }
                }
            }
    return col;
}

void col2im_add(const ConvGeometry& g, const RowMatrix& col, Vector& image) {
    for (Index b = 0; b < g.n; ++b)
        for (Index oy = 0; oy < g.out_h; ++oy)
            for (Index ox = 0; ox < g.out_w; ++ox) {
                const Index row = (b * g.out_h + oy) * g.out_w + ox;
                for (Index ky = 0; ky < g.kh; ++ky) {
                    const Index y = oy * g.stride - g.pad_top + ky;
                    if (y < 0 || y >= g.h) continue;
                    for (Index kx = 0; kx < g.kw; ++kx) {
                        const Index x = ox * g.stride - g.pad_left + kx;
                        if (x < 0 || x >= g.w) continue;
                        image.segment(((b * g.h + y) * g.w + x) * g.c, g.c) +=
                            col.row(row).segment((ky * g.kw + kx) * g.c, g.c).transpose();
                    }
                }
            }
}

void check_kernel(const char* op, const Shape& input, const Shape& kernel, Index stride) {
    if (input.size() != 4) throw ShapeError(std::string(op) + ": input must be [N,H,W,C], got " + to_string(input));
    if (kernel.size() != 4) throw ShapeError(std::string(op) + ": kernel must be rank 4, got " + to_string(kernel));
    if (kernel[0] % 2 == 0 || kernel[1] % 2 == 0)
        throw ShapeError(std::string(op) + ": kernel size must be odd, got " + to_string(kernel));
    if (stride < 1) throw ContractError(std::string(op) + ": stride must be >= 1");
}

}  // namespace

Var conv2d(Var input, Var kernel, Index stride, Padding padding) {
    if (&input.tape() != &kernel.tape()) throw ContractError("conv2d: operands live on different tapes");
    const Shape& xs = input.shape();
    const Shape& ks = kernel.shape();
    check_kernel("conv2d", xs, ks, stride);
    if (ks[2] != xs[3])
        throw ShapeError("conv2d: input has " + std::to_string(xs[3]) + " channels but kernel " + to_string(ks) +
                         " expects " + std::to_string(ks[2]));
    const ConvGeometry g = make_geometry(xs, ks[0], ks[1], stride, padding);
    const Index cout = ks[3];

    RowMatrix col = im2col(g, input.value());
    Vector out(g.rows() * cout);
    Eigen::Map<RowMatrix>(out.data(), g.rows(), cout).noalias() = col * ConstMat(kernel.value().data(), g.cols(), cout);

    const std::size_t ix = input.id(), ik = kernel.id();
    return input.tape().record(
        "conv2d", {g.n, g.out_h, g.out_w, cout}, std::move(out), {ix, ik},
        [ix, ik, g, cout, col = std::move(col)](const Vector& grad, Tape& t) {
            const ConstMat gout(grad.data(), g.rows(), cout);
            t.accumulate_with(ik, [&](Vector& acc) {
                Eigen::Map<RowMatrix>(acc.data(), g.cols(), cout).noalias() += col.transpose() * gout;
            });
            t.accumulate_with(ix, [&](Vector& acc) {
                const RowMatrix gcol = gout * ConstMat(t.value(ik).data(), g.cols(), cout).transpose();
                col2im_add(g, gcol, acc);
            });
        });
}

Var transposed_conv2d(Var input, Var kernel, Index stride) {
    if (&input.tape() != &kernel.tape()) throw ContractError("transposed_conv2d: operands live on different tapes");
    const Shape& ys = input.shape();
    const Shape& ks = kernel.shape();
    check_kernel("transposed_conv2d", ys, ks, stride);
    if (ks[3] != ys[3])
        throw ShapeError("transposed_conv2d: input has " + std::to_string(ys[3]) + " channels but kernel " +
                         to_string(ks) + " expects " + std::to_string(ks[3]));
    const Index cin = ys[3];
    // Geometry of the convolution this operator is the adjoint of.
    const ConvGeometry g =
        make_geometry({ys[0], ys[1] * stride, ys[2] * stride, ks[2]}, ks[0], ks[1], stride, Padding::same);

    const Vector& yv = input.value();
    const RowMatrix gcol = ConstMat(yv.data(), g.rows(), cin) * ConstMat(kernel.value().data(), g.cols(), cin).transpose();
    Vector out = Vector::Zero(g.n * g.h * g.w * g.c);
    col2im_add(g, gcol, out);

    const std::size_t iy = input.id(), ik = kernel.id();
    return input.tape().record(
        "transposed_conv2d", {g.n, g.h, g.w, g.c}, std::move(out), {iy, ik},
        [iy, ik, g, cin](const Vector& grad, Tape& t) {
            const RowMatrix col = im2col(g, grad);
            t.accumulate_with(iy, [&](Vector& acc) {
                Eigen::Map<RowMatrix>(acc.data(), g.rows(), cin).noalias() +=
                    col * ConstMat(t.value(ik).data(), g.cols(), cin);
            });
            t.accumulate_with(ik, [&](Vector& acc) {
                Eigen::Map<RowMatrix>(acc.data(), g.cols(), cin).noalias() +=
                    col.transpose() * ConstMat(t.value(iy).data(), g.rows(), cin);
            });
        });
}

}  // namespace fogkit::ad
