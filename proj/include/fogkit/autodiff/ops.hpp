#pragma once

#include "fogkit/autodiff/tensor.hpp"

#include <span>
#include <vector>

namespace fogkit::ad {

enum class Padding { same, valid };

// Elementwise. `b` may either match `a` exactly or match a suffix of
// a's shape, in which case it is broadcast over the leading dimensions.
Var add(Var a, Var b);
Var sub(Var a, Var b);
Var mul(Var a, Var b);
Var div(Var a, Var b);

Var scale(Var x, double factor);
Var add_scalar(Var x, double value);
Var relu(Var x);
Var sigmoid(Var x);
Var abs(Var x);

Var sum(Var x);
Var mean(Var x);

Var reshape(Var x, Shape shape);
/// Reorders axes: output axis i is input axis `axes[i]`.
Var permute(Var x, const std::vector<Index>& axes);
/// `length` consecutive entries of `axis` starting at `start`.
Var slice(Var x, Index axis, Index start, Index length);
Var concat(std::span<const Var> parts, Index axis);
std::vector<Var> split(Var x, Index axis, std::span<const Index> sizes);

/// Batched matrix product over the last two axes; leading (batch) axes
/// broadcast numpy-style.
Var matmul(Var a, Var b);

/// Max-subtracted softmax along `axis` (negative counts from the end).
Var softmax(Var x, Index axis);
/// Standardizes along `axis` then applies per-entry gamma and beta, both of
/// shape [x.shape[axis]].
Var layer_norm(Var x, Index axis, Var gamma, Var beta, double epsilon = 1e-5);

/// NHWC convolution with a [kh, kw, Cin, Cout] kernel. Same padding follows
/// the TensorFlow convention (output ceil(H / stride), extra pad on the
/// bottom/right).
Var conv2d(Var input, Var kernel, Index stride, Padding padding);
/// Adjoint of conv2d with same padding. Kernel is [kh, kw, Cout, Cin]: the
/// kernel of the convolution that maps the output back onto the input.
/// Spatial dims grow by `stride`.
Var transposed_conv2d(Var input, Var kernel, Index stride);

Index normalize_axis(Index axis, Index rank);

}  // namespace fogkit::ad
