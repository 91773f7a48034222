#include "fogkit/autodiff/ops.hpp"

#include "fogkit/errors.hpp"

#include <cmath>

namespace fogkit::ad {
namespace {

Tape& common_tape(Var a, Var b) {
    if (&a.tape() != &b.tape()) throw ContractError("operands live on different tapes");
    return a.tape();
}

// Number of times b repeats across a; throws unless b's shape is a suffix of a's.
Index broadcast_repeats(const char* op, const Shape& a, const Shape& b) {
    if (b.size() > a.size()) throw ShapeError(std::string(op) + ": cannot broadcast " + to_string(b) + " onto " + to_string(a));
    for (std::size_t i = 0; i < b.size(); ++i) {
        if (a[a.size() - b.size() + i] != b[i])
            throw ShapeError(std::string(op) + ": cannot broadcast " + to_string(b) + " onto " + to_string(a));
    }
    return element_count(a) / element_count(b);
}

// Sum of `g` over the repeated leading block structure: result[j] = sum_r g[r*n + j].
Vector fold(const Vector& g, Index repeats) {
    const Index n = g.size() / repeats;
    return Eigen::Map<const RowMatrix>(g.data(), repeats, n).colwise().sum().transpose();
}

template <typename Fwd, typename BwdA, typename BwdB>
Var binary(const char* op, Var a, Var b, Fwd fwd, BwdA da, BwdB db) {
    Tape& tape = common_tape(a, b);
    const Index repeats = broadcast_repeats(op, a.shape(), b.shape());
    const Index nb = b.size();
    const Vector& av = a.value();
    const Vector& bv = b.value();
    Vector out(av.size());
    for (Index r = 0; r < repeats; ++r)
        out.segment(r * nb, nb) = fwd(av.segment(r * nb, nb).array(), bv.array()).matrix();
    const std::size_t ia = a.id(), ib = b.id();
    return tape.record(op, a.shape(), std::move(out), {ia, ib},
                       [ia, ib, repeats, nb, da, db](const Vector& g, Tape& t) {
                           const Vector& x = t.value(ia);
                           const Vector& y = t.value(ib);
                           t.accumulate_with(ia, [&](Vector& acc) {
                               for (Index r = 0; r < repeats; ++r)
                                   acc.segment(r * nb, nb).array() +=
                                       da(g.segment(r * nb, nb).array(), x.segment(r * nb, nb).array(), y.array());
                           });
                           t.accumulate_with(ib, [&](Vector& acc) {
                               Vector full(g.size());
                               for (Index r = 0; r < repeats; ++r)
                                   full.segment(r * nb, nb) =
                                       db(g.segment(r * nb, nb).array(), x.segment(r * nb, nb).array(), y.array()).matrix();
                               acc += repeats == 1 ? full : fold(full, repeats);
                           });
                       });
}

template <typename Fwd, typename Bwd>
Var unary(const char* op, Var x, Fwd fwd, Bwd bwd) {
    Vector out = fwd(x.value().array()).matrix();
    const std::size_t ix = x.id();
    const std::size_t iy = x.tape().size();
    return x.tape().record(op, x.shape(), std::move(out), {ix}, [ix, iy, bwd](const Vector& g, Tape& t) {
        t.accumulate_with(ix, [&](Vector& acc) { acc.array() += bwd(g.array(), t.value(ix).array(), t.value(iy).array()); });
    });
}

}  // namespace

Var add(Var a, Var b) {
    return binary(
        "add", a, b, [](const auto& x, const auto& y) { return x + y; },
        [](const auto& g, const auto&, const auto&) { return g; },
        [](const auto& g, const auto&, const auto&) { return g; });
}

Var sub(Var a, Var b) {
    return binary(
        "sub", a, b, [](const auto& x, const auto& y) { return x - y; },
        [](const auto& g, const auto&, const auto&) { return g; },
        [](const auto& g, const auto&, const auto&) { return -g; });
}

Var mul(Var a, Var b) {
    return binary(
        "mul", a, b, [](const auto& x, const auto& y) { return x * y; },
        [](const auto& g, const auto&, const auto& y) { return g * y; },
        [](const auto& g, const auto& x, const auto&) { return g * x; });
}

Var div(Var a, Var b) {
    return binary(
        "div", a, b, [](const auto& x, const auto& y) { return x / y; },
        [](const auto& g, const auto&, const auto& y) { return g / y; },
        [](const auto& g, const auto& x, const auto& y) { return -g * x / (y * y); });
}

Var scale(Var x, double factor) {
    return unary(
        "scale", x, [factor](const auto& v) { return v * factor; },
        [factor](const auto& g, const auto&, const auto&) { return g * factor; });
}

Var add_scalar(Var x, double value) {
    return unary(
        "add_scalar", x, [value](const auto& v) { return v + value; },
        [](const auto& g, const auto&, const auto&) { return g; });
}

Var relu(Var x) {
    return unary(
        "relu", x, [](const auto& v) { return v.max(0.0); },
        [](const auto& g, const auto& in, const auto&) { return (in > 0.0).select(g, 0.0); });
}

Var sigmoid(Var x) {
    // 0.5 * (1 + tanh(x / 2)) never overflows.
    return unary(
        "sigmoid", x, [](const auto& v) { return 0.5 * ((0.5 * v).tanh() + 1.0); },
        [](const auto& g, const auto&, const auto& y) { return g * y * (1.0 - y); });
}

Var abs(Var x) {
    return unary(
        "abs", x, [](const auto& v) { return v.abs(); },
        [](const auto& g, const auto& in, const auto&) {
            return (in > 0.0).select(g, (in < 0.0).select(-g, 0.0));
        });
}

Var sum(Var x) {
    const std::size_t ix = x.id();
    return x.tape().record("sum", {1}, Vector::Constant(1, x.value().sum()), {ix},
                           [ix](const Vector& g, Tape& t) {
                               t.accumulate_with(ix, [&](Vector& acc) { acc.array() += g[0]; });
                           });
}

Var mean(Var x) {
    const std::size_t ix = x.id();
    const double inv = 1.0 / static_cast<double>(x.size());
    return x.tape().record("mean", {1}, Vector::Constant(1, x.value().sum() * inv), {ix},
                           [ix, inv](const Vector& g, Tape& t) {
                               t.accumulate_with(ix, [&](Vector& acc) { acc.array() += g[0] * inv; });
                           });
}

}  // namespace fogkit::ad
