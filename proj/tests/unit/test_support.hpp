#pragma once

#include "fogkit/autodiff/ops.hpp"

#include <algorithm>
#include <cmath>
#include <functional>
#include <random>
#include <span>
#include <vector>

namespace fogkit::testing {

using ad::Index;
using ad::Shape;
using ad::Tensor;
using ad::Vector;

inline Tensor random_tensor(const Shape& shape, std::mt19937_64& rng, double lo = -1.0, double hi = 1.0,
                            bool requires_grad = true) {
    std::uniform_real_distribution<double> dist(lo, hi);
    Vector v(ad::element_count(shape));
    for (Index i = 0; i < v.size(); ++i) v[i] = dist(rng);
    return Tensor(shape, std::move(v), requires_grad);
}

/// Values bounded away from zero so relu/abs kinks stay out of reach of a
/// finite-difference step.
inline Tensor random_away_from_zero(const Shape& shape, std::mt19937_64& rng) {
    Tensor t = random_tensor(shape, rng, 0.1, 1.0);
    std::bernoulli_distribution sign(0.5);
    for (Index i = 0; i < t.size(); ++i)
        if (sign(rng)) t.data()[i] = -t.data()[i];
    return t;
}

using Builder = std::function<ad::Var(ad::Tape&, std::span<const ad::Var>)>;

inline double forward_scalar(const Builder& build, std::vector<Tensor>& inputs) {
    ad::Tape tape;
    std::vector<ad::Var> vars;
    for (auto& t : inputs) vars.push_back(tape.watch(t));
    return build(tape, vars).item();
}

/// Central-difference gradient of a scalar builder w.r.t. input `which`.
inline Vector numeric_gradient(const Builder& build, std::vector<Tensor> inputs, std::size_t which, double h = 1e-5) {
    for (auto& t : inputs) t.set_requires_grad(false);
    Tensor& x = inputs[which];
    Vector g(x.size());
    for (Index i = 0; i < x.size(); ++i) {
        const double orig = x.data()[i];
        x.data()[i] = orig + h;
        const double up = forward_scalar(build, inputs);
        x.data()[i] = orig - h;
        const double down = forward_scalar(build, inputs);
        x.data()[i] = orig;
        g[i] = (up - down) / (2 * h);
    }
    return g;
}

/// Reverse-mode gradients of a scalar builder for every input.
inline std::vector<Vector> analytic_gradients(const Builder& build, std::vector<Tensor>& inputs) {
    {
        ad::Tape tape;
        std::vector<ad::Var> vars;
        for (auto& t : inputs) {
            t.zero_grad();
            t.set_requires_grad(true);
            vars.push_back(tape.watch(t));
        }
        tape.backward(build(tape, vars));
    }
    std::vector<Vector> out;
    for (auto& t : inputs) out.push_back(t.grad() ? *t.grad() : Vector::Zero(t.size()));
    return out;
}

inline double max_relative_error(const Vector& a, const Vector& b, double floor = 1e-6) {
    double worst = 0.0;
    for (Index i = 0; i < a.size(); ++i) {
        const double d = std::max({std::abs(a[i]), std::abs(b[i]), floor});
        worst = std::max(worst, std::abs(a[i] - b[i]) / d);
    }
    return worst;
}

/// Worst relative mismatch between reverse-mode and finite-difference
/// gradients over all inputs. The denominator floor scales with the largest
/// gradient entry so identically-zero gradients compare against round-off.
inline double gradient_error(const Builder& build, std::vector<Tensor> inputs, double h = 1e-5) {
    const auto analytic = analytic_gradients(build, inputs);
    double scale = 1.0;
    for (const auto& g : analytic) scale = std::max(scale, g.cwiseAbs().maxCoeff());
    double worst = 0.0;
    for (std::size_t k = 0; k < inputs.size(); ++k)
        worst = std::max(worst, max_relative_error(analytic[k], numeric_gradient(build, inputs, k, h), 1e-6 * scale));
    return worst;
}

/// Dot-product test of an op's backward rule: compares <J dx, dy> (J dx by
/// central differences along dx) with <dx, J^T dy> (reverse mode). Returns
/// the relative gap.
inline double adjoint_gap(const Builder& op, std::vector<Tensor> inputs, std::uint64_t seed, double h = 1e-5) {
    std::mt19937_64 rng(seed);
    std::vector<Tensor> dirs;
    for (const auto& t : inputs) dirs.push_back(random_tensor(t.shape(), rng));

    Vector y0;
    {
        ad::Tape tape;
        std::vector<ad::Var> vars;
        for (auto& t : inputs) vars.push_back(tape.constant(t));
        y0 = op(tape, vars).value();
    }
    Tensor dy = random_tensor({y0.size()}, rng, -1, 1, false);

    auto eval = [&](double step) {
        ad::Tape tape;
        std::vector<ad::Var> vars;
        for (std::size_t k = 0; k < inputs.size(); ++k) {
            Tensor shifted(inputs[k].shape(), inputs[k].data() + step * dirs[k].data());
            vars.push_back(tape.constant(shifted));
        }
        return Vector(op(tape, vars).value());
    };
    const Vector jdx = (eval(h) - eval(-h)) / (2 * h);
    const double lhs = jdx.dot(dy.data());

    Builder weighted = [&](ad::Tape& tape, std::span<const ad::Var> vars) {
        const ad::Var y = op(tape, vars);
        return ad::sum(ad::mul(ad::reshape(y, {y.size()}), tape.constant(dy)));
    };
    const auto grads = analytic_gradients(weighted, inputs);
    double rhs = 0.0;
    for (std::size_t k = 0; k < inputs.size(); ++k) rhs += grads[k].dot(dirs[k].data());
    return std::abs(lhs - rhs) / std::max({std::abs(lhs), std::abs(rhs), 1e-12});
}

}  // namespace fogkit::testing
