#include "fogkit/autodiff/ops.hpp"

#include "fogkit/errors.hpp"

#include <algorithm>
#include <numeric>

namespace fogkit::ad {
namespace {

std::vector<Index> strides_of(const Shape& shape) {
    std::vector<Index> s(shape.size(), 1);
    for (std::size_t i = shape.size(); i-- > 1;) s[i - 1] = s[i] * shape[i];
    return s;
}

// Maps every output flat index of a permutation to its input flat index.
std::vector<Index> permutation_map(const Shape& in_shape, const std::vector<Index>& axes) {
    const std::size_t rank = in_shape.size();
    const auto in_strides = strides_of(in_shape);
    Shape out_shape(rank);
    std::vector<Index> src_stride(rank);
    for (std::size_t i = 0; i < rank; ++i) {
        out_shape[i] = in_shape[static_cast<std::size_t>(axes[i])];
        src_stride[i] = in_strides[static_cast<std::size_t>(axes[i])];
    }
    const Index n = element_count(in_shape);
    std::vector<Index> map(static_cast<std::size_t>(n));
    std::vector<Index> counter(rank, 0);
    Index src = 0;
    for (Index o = 0; o < n; ++o) {
        map[static_cast<std::size_t>(o)] = src;
        for (std::size_t d = rank; d-- > 0;) {
            if (++counter[d] < out_shape[d]) {
                src += src_stride[d];
                break;
            }
            src -= src_stride[d] * (out_shape[d] - 1);
            counter[d] = 0;
        }
    }
    return map;
}

}  // namespace

Index normalize_axis(Index axis, Index rank) {
    const Index a = axis < 0 ? axis + rank : axis;
    if (a < 0 || a >= rank)
        throw ShapeError("axis " + std::to_string(axis) + " out of range for rank " + std::to_string(rank));
    return a;
}

Var reshape(Var x, Shape shape) {
    if (element_count(shape) != x.size())
        throw ShapeError("reshape: cannot view " + to_string(x.shape()) + " as " + to_string(shape));
    const std::size_t ix = x.id();
    return x.tape().record("reshape", std::move(shape), x.value(), {ix},
                           [ix](const Vector& g, Tape& t) { t.accumulate(ix, g); });
}

Var permute(Var x, const std::vector<Index>& axes) {
    const Shape& in = x.shape();
    if (axes.size() != in.size()) throw ShapeError("permute: axis list does not match rank of " + to_string(in));
    std::vector<Index> sorted = axes;
    std::sort(sorted.begin(), sorted.end());
    for (std::size_t i = 0; i < sorted.size(); ++i)
        if (sorted[i] != static_cast<Index>(i)) throw ShapeError("permute: axes are not a permutation");
    Shape out_shape(in.size());
    for (std::size_t i = 0; i < in.size(); ++i) out_shape[i] = in[static_cast<std::size_t>(axes[i])];

    auto map = permutation_map(in, axes);
    const Vector& v = x.value();
    Vector out(v.size());
    for (std::size_t o = 0; o < map.size(); ++o) out[static_cast<Index>(o)] = v[map[o]];
    const std::size_t ix = x.id();
    return x.tape().record("permute", std::move(out_shape), std::move(out), {ix},
                           [ix, map = std::move(map)](const Vector& g, Tape& t) {
                               t.accumulate_with(ix, [&](Vector& acc) {
                                   for (std::size_t o = 0; o < map.size(); ++o) acc[map[o]] += g[static_cast<Index>(o)];
                               });
                           });
}

Var slice(Var x, Index axis, Index start, Index length) {
    const Shape& in = x.shape();
    const Index ax = normalize_axis(axis, static_cast<Index>(in.size()));
    const auto a = static_cast<std::size_t>(ax);
    if (start < 0 || length <= 0 || start + length > in[a])
        throw ShapeError("slice: range [" + std::to_string(start) + ", " + std::to_string(start + length) +
                         ") outside axis of size " + std::to_string(in[a]));
    const Index outer = std::accumulate(in.begin(), in.begin() + ax, Index{1}, std::multiplies<>());
    const Index inner = std::accumulate(in.begin() + ax + 1, in.end(), Index{1}, std::multiplies<>());
    Shape out_shape = in;
    out_shape[a] = length;
    const Index src_block = in[a] * inner, dst_block = length * inner;
    const Vector& v = x.value();
    Vector out(outer * dst_block);
    for (Index o = 0; o < outer; ++o) out.segment(o * dst_block, dst_block) = v.segment(o * src_block + start * inner, dst_block);
    const std::size_t ix = x.id();
    return x.tape().record("slice", std::move(out_shape), std::move(out), {ix},
                           [=](const Vector& g, Tape& t) {
                               t.accumulate_with(ix, [&](Vector& acc) {
                                   for (Index o = 0; o < outer; ++o)
                                       acc.segment(o * src_block + start * inner, dst_block) += g.segment(o * dst_block, dst_block);
                               });
                           });
}

Var concat(std::span<const Var> parts, Index axis) {
    if (parts.empty()) throw ShapeError("concat: no inputs");
    Tape& tape = parts.front().tape();
    const Shape& first = parts.front().shape();
    const Index ax = normalize_axis(axis, static_cast<Index>(first.size()));
    const auto a = static_cast<std::size_t>(ax);
    Shape out_shape = first;
    out_shape[a] = 0;
    std::vector<Index> widths;
    std::vector<std::size_t> ids;
    for (const Var& p : parts) {
        if (&p.tape() != &tape) throw ContractError("concat: operands live on different tapes");
        const Shape& s = p.shape();
        if (s.size() != first.size()) throw ShapeError("concat: rank mismatch " + to_string(s) + " vs " + to_string(first));
        for (std::size_t d = 0; d < s.size(); ++d)
            if (d != a && s[d] != first[d])
                throw ShapeError("concat: shape " + to_string(s) + " does not match " + to_string(first) +
                                 " outside axis " + std::to_string(ax));
        out_shape[a] += s[a];
        ids.push_back(p.id());
    }
    const Index outer = std::accumulate(first.begin(), first.begin() + ax, Index{1}, std::multiplies<>());
    const Index inner = std::accumulate(first.begin() + ax + 1, first.end(), Index{1}, std::multiplies<>());
    for (const Var& p : parts) widths.push_back(p.shape()[a] * inner);
    const Index row = out_shape[a] * inner;

    Vector out(outer * row);
    Index offset = 0;
    for (std::size_t k = 0; k < parts.size(); ++k) {
        const Vector& v = parts[k].value();
        for (Index o = 0; o < outer; ++o) out.segment(o * row + offset, widths[k]) = v.segment(o * widths[k], widths[k]);
        offset += widths[k];
    }
    return tape.record("concat", std::move(out_shape), std::move(out), ids,
                       [ids, widths, outer, row](const Vector& g, Tape& t) {
                           Index off = 0;
                           for (std::size_t k = 0; k < ids.size(); ++k) {
                               const Index w = widths[k];
                               t.accumulate_with(ids[k], [&](Vector& acc) {
                                   for (Index o = 0; o < outer; ++o) acc.segment(o * w, w) += g.segment(o * row + off, w);
                               });
                               off += w;
                           }
                       });
}

std::vector<Var> split(Var x, Index axis, std::span<const Index> sizes) {
    const Index ax = normalize_axis(axis, x.rank());
    const Index total = std::accumulate(sizes.begin(), sizes.end(), Index{0});
    if (total != x.shape()[static_cast<std::size_t>(ax)])
        throw ShapeError("split: sizes do not add up to axis length of " + to_string(x.shape()));
    std::vector<Var> out;
    Index start = 0;
    for (Index s : sizes) {
        out.push_back(slice(x, ax, start, s));
        start += s;
    }
    return out;
}

}  // namespace fogkit::ad
