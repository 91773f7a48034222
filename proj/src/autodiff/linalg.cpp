#include "fogkit/autodiff/ops.hpp"

#include "fogkit/errors.hpp"

#include <cmath>
#include <numeric>

namespace fogkit::ad {
namespace {

using ConstMat = Eigen::Map<const RowMatrix>;
using Mat = Eigen::Map<RowMatrix>;

struct BatchPlan {
    Shape out_shape;
    std::vector<Index> a_offsets, b_offsets;  // per output batch entry, in matrices
};

BatchPlan plan_batches(const Shape& a, const Shape& b, Index m, Index n) {
    const std::size_t ra = a.size() - 2, rb = b.size() - 2;
    const std::size_t rank = std::max(ra, rb);
    Shape batch(rank), sa(rank, 1), sb(rank, 1);
    for (std::size_t i = 0; i < ra; ++i) sa[rank - ra + i] = a[i];
    for (std::size_t i = 0; i < rb; ++i) sb[rank - rb + i] = b[i];
    for (std::size_t i = 0; i < rank; ++i) {
        if (sa[i] != sb[i] && sa[i] != 1 && sb[i] != 1)
            throw ShapeError("matmul: batch dims of " + to_string(a) + " and " + to_string(b) + " do not broadcast");
        batch[i] = std::max(sa[i], sb[i]);
    }
    // Strides in units of whole matrices, zero where broadcast.
    std::vector<Index> stride_a(rank, 0), stride_b(rank, 0);
    Index ka = 1, kb = 1;
    for (std::size_t i = rank; i-- > 0;) {
        stride_a[i] = sa[i] == 1 ? 0 : ka;
        stride_b[i] = sb[i] == 1 ? 0 : kb;
        ka *= sa[i];
        kb *= sb[i];
    }
    BatchPlan plan;
    const Index count = std::accumulate(batch.begin(), batch.end(), Index{1}, std::multiplies<>());
    std::vector<Index> counter(rank, 0);
    for (Index e = 0; e < count; ++e) {
        Index oa = 0, ob = 0;
        for (std::size_t i = 0; i < rank; ++i) {
            oa += counter[i] * stride_a[i];
            ob += counter[i] * stride_b[i];
        }
        plan.a_offsets.push_back(oa);
        plan.b_offsets.push_back(ob);
        for (std::size_t i = rank; i-- > 0;) {
            if (++counter[i] < batch[i]) break;
            counter[i] = 0;
        }
    }
    plan.out_shape = batch;
    plan.out_shape.push_back(m);
    plan.out_shape.push_back(n);
    return plan;
}

// Splits a shape around `axis` into (outer, length, inner).
struct AxisView {
    Index outer, length, inner;
};

AxisView axis_view(const Shape& shape, Index axis) {
    const Index ax = normalize_axis(axis, static_cast<Index>(shape.size()));
    return {std::accumulate(shape.begin(), shape.begin() + ax, Index{1}, std::multiplies<>()),
            shape[static_cast<std::size_t>(ax)],
            std::accumulate(shape.begin() + ax + 1, shape.end(), Index{1}, std::multiplies<>())};
}

}  // namespace

Var matmul(Var a, Var b) {
    if (&a.tape() != &b.tape()) throw ContractError("matmul: operands live on different tapes");
    const Shape& sa = a.shape();
    const Shape& sb = b.shape();
    if (sa.size() < 2 || sb.size() < 2) throw ShapeError("matmul: operands need rank >= 2");
    const Index m = sa[sa.size() - 2], k = sa.back(), n = sb.back();
    if (sb[sb.size() - 2] != k)
        throw ShapeError("matmul: inner dimensions differ, " + to_string(sa) + " x " + to_string(sb));
    BatchPlan plan = plan_batches(sa, sb, m, n);

    const Vector& av = a.value();
    const Vector& bv = b.value();
    const Index batches = static_cast<Index>(plan.a_offsets.size());
    Vector out(batches * m * n);
    for (Index e = 0; e < batches; ++e) {
        Mat(out.data() + e * m * n, m, n).noalias() =
            ConstMat(av.data() + plan.a_offsets[e] * m * k, m, k) * ConstMat(bv.data() + plan.b_offsets[e] * k * n, k, n);
    }
    const std::size_t ia = a.id(), ib = b.id();
    Shape out_shape = plan.out_shape;
    return a.tape().record(
        "matmul", std::move(out_shape), std::move(out), {ia, ib},
        [ia, ib, m, k, n, plan = std::move(plan)](const Vector& g, Tape& t) {
            const Vector& av = t.value(ia);
            const Vector& bv = t.value(ib);
            const auto batches = plan.a_offsets.size();
            t.accumulate_with(ia, [&](Vector& acc) {
                for (std::size_t e = 0; e < batches; ++e)
                    Mat(acc.data() + plan.a_offsets[e] * m * k, m, k).noalias() +=
                        ConstMat(g.data() + static_cast<Index>(e) * m * n, m, n) *
                        ConstMat(bv.data() + plan.b_offsets[e] * k * n, k, n).transpose();
            });
            t.accumulate_with(ib, [&](Vector& acc) {
                for (std::size_t e = 0; e < batches; ++e)
                    Mat(acc.data() + plan.b_offsets[e] * k * n, k, n).noalias() +=
                        ConstMat(av.data() + plan.a_offsets[e] * m * k, m, k).transpose() *
                        ConstMat(g.data() + static_cast<Index>(e) * m * n, m, n);
            });
        });
}

Var softmax(Var x, Index axis) {
    const AxisView view = axis_view(x.shape(), axis);
    const Vector& v = x.value();
    Vector out(v.size());
    for (Index o = 0; o < view.outer; ++o) {
        for (Index i = 0; i < view.inner; ++i) {
            const Index base = o * view.length * view.inner + i;
            double peak = v[base];
            for (Index j = 1; j < view.length; ++j) peak = std::max(peak, v[base + j * view.inner]);
            double total = 0.0;
            for (Index j = 0; j < view.length; ++j) {
                const double e = std::exp(v[base + j * view.inner] - peak);
                out[base + j * view.inner] = e;
                total += e;
            }
            for (Index j = 0; j < view.length; ++j) out[base + j * view.inner] /= total;
        }
    }
    const std::size_t ix = x.id();
    const std::size_t iy = x.tape().size();
    return x.tape().record("softmax", x.shape(), std::move(out), {ix}, [ix, iy, view](const Vector& g, Tape& t) {
        const Vector& y = t.value(iy);
        t.accumulate_with(ix, [&](Vector& acc) {
            for (Index o = 0; o < view.outer; ++o) {
                for (Index i = 0; i < view.inner; ++i) {
                    const Index base = o * view.length * view.inner + i;
                    double dot = 0.0;
                    for (Index j = 0; j < view.length; ++j) dot += g[base + j * view.inner] * y[base + j * view.inner];
                    for (Index j = 0; j < view.length; ++j) {
                        const Index p = base + j * view.inner;
                        acc[p] += y[p] * (g[p] - dot);
                    }
                }
            }
        });
    });
}

Var layer_norm(Var x, Index axis, Var gamma, Var beta, double epsilon) {
    const AxisView view = axis_view(x.shape(), axis);
    if (gamma.size() != view.length || beta.size() != view.length)
        throw ShapeError("layer_norm: gamma/beta must have " + std::to_string(view.length) + " entries");
    const Vector& v = x.value();
    const Vector& gv = gamma.value();
    const Vector& bv = beta.value();
    const Index groups = view.outer * view.inner;
    Vector normalized(v.size());
    Vector inv_std(groups);
    Vector out(v.size());
    const double inv_n = 1.0 / static_cast<double>(view.length);
    for (Index o = 0; o < view.outer; ++o) {
        for (Index i = 0; i < view.inner; ++i) {
            const Index base = o * view.length * view.inner + i;
            double mu = 0.0;
            for (Index j = 0; j < view.length; ++j) mu += v[base + j * view.inner];
            mu *= inv_n;
            double var = 0.0;
            for (Index j = 0; j < view.length; ++j) {
                const double d = v[base + j * view.inner] - mu;
                var += d * d;
            }
            var *= inv_n;
            const double is = 1.0 / std::sqrt(var + epsilon);
            inv_std[o * view.inner + i] = is;
            for (Index j = 0; j < view.length; ++j) {
                const Index p = base + j * view.inner;
                normalized[p] = (v[p] - mu) * is;
                out[p] = normalized[p] * gv[j] + bv[j];
            }
        }
    }
    const std::size_t ix = x.id(), ig = gamma.id(), ib = beta.id();
    return x.tape().record(
        "layer_norm", x.shape(), std::move(out), {ix, ig, ib},
        [=, normalized = std::move(normalized), inv_std = std::move(inv_std)](const Vector& g, Tape& t) {
            const Vector& gv = t.value(ig);
            t.accumulate_with(ix, [&](Vector& acc) {
                for (Index o = 0; o < view.outer; ++o) {
                    for (Index i = 0; i < view.inner; ++i) {
                        const Index base = o * view.length * view.inner + i;
                        double mean_g = 0.0, mean_gx = 0.0;
                        for (Index j = 0; j < view.length; ++j) {
                            const Index p = base + j * view.inner;
                            const double gh = g[p] * gv[j];
                            mean_g += gh;
                            mean_gx += gh * normalized[p];
                        }
                        mean_g *= inv_n;
                        mean_gx *= inv_n;
                        const double is = inv_std[o * view.inner + i];
                        for (Index j = 0; j < view.length; ++j) {
                            const Index p = base + j * view.inner;
                            acc[p] += is * (g[p] * gv[j] - mean_g - normalized[p] * mean_gx);
                        }
                    }
                }
            });
            t.accumulate_with(ig, [&](Vector& acc) {
                for (Index o = 0; o < view.outer; ++o)
                    for (Index j = 0; j < view.length; ++j)
                        for (Index i = 0; i < view.inner; ++i) {
                            const Index p = (o * view.length + j) * view.inner + i;
                            acc[j] += g[p] * normalized[p];
                        }
            });
            t.accumulate_with(ib, [&](Vector& acc) {
                for (Index o = 0; o < view.outer; ++o)
                    for (Index j = 0; j < view.length; ++j)
                        for (Index i = 0; i < view.inner; ++i) acc[j] += g[(o * view.length + j) * view.inner + i];
            });
        });
}

}  // namespace fogkit::ad
