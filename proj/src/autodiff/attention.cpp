#include "fogkit/autodiff/attention.hpp"

#include "fogkit/errors.hpp"

#include <cmath>

namespace fogkit::ad {
namespace {

// [B, T, D] -> [B, heads, T, D / heads]
Var split_heads(Var x, Index heads) {
    const Shape& s = x.shape();
    const Index b = s[0], t = s[1], d = s[2];
    return permute(reshape(x, {b, t, heads, d / heads}), {0, 2, 1, 3});
}

}  // namespace

AttentionResult multi_head_attention(Var query, Var key, Var value, Index heads, const AttentionWeights& w) {
    const Shape shape = query.shape();
    if (shape.size() < 2) throw ShapeError("multi_head_attention: inputs must be [..., T, D]");
    if (key.shape() != shape || value.shape() != shape)
        throw ShapeError("multi_head_attention: query, key and value shapes differ");
    const Index d = shape.back();
    const Index t = shape[shape.size() - 2];
    if (heads < 1 || d % heads != 0)
        throw ConfigError("multi_head_attention: model dim " + std::to_string(d) + " not divisible by " +
                          std::to_string(heads) + " heads");
    const Index b = element_count(shape) / (t * d);
    const Index head_dim = d / heads;

    auto project = [&](Var x, Var weight, Var bias) { return add(matmul(reshape(x, {b, t, d}), weight), bias); };
    const Var q = split_heads(project(query, w.w_query, w.b_query), heads);
    const Var k = split_heads(project(key, w.w_key, w.b_key), heads);
    const Var v = split_heads(project(value, w.w_value, w.b_value), heads);

    const Var scores = scale(matmul(q, permute(k, {0, 1, 3, 2})), 1.0 / std::sqrt(static_cast<double>(head_dim)));
    const Var attn = softmax(scores, -1);
    const Var mixed = reshape(permute(matmul(attn, v), {0, 2, 1, 3}), {b, t, d});
    const Var out = add(matmul(mixed, w.w_out), w.b_out);
    return {reshape(out, shape), attn};
}

}  // namespace fogkit::ad
