#include "fogkit/autodiff/adam.hpp"
#include "fogkit/autodiff/gradcheck.hpp"
#include "fogkit/autodiff/ops.hpp"
#include "fogkit/errors.hpp"

#include <doctest.h>

#include <cmath>
#include <vector>

using namespace fogkit;
using namespace fogkit::ad;

TEST_CASE("zero gradient leaves parameters unchanged and advances the step") {
    Tensor p({3}, Vector::Constant(3, 0.7), true);
    AdamState state;
    Tensor* params[] = {&p};
    adam_step(params, state);
    CHECK(p.data() == Vector::Constant(3, 0.7));
    CHECK(state.step == 1);
    adam_step(params, state);
    CHECK(state.step == 2);
}

TEST_CASE("first step moves by the learning rate against the gradient sign") {
    Vector param = Vector::Constant(1, 1.0);
    Vector grad = Vector::Constant(1, 0.5);
    AdamState state;
    state.learning_rate = 0.1;
    Vector* params[] = {&param};
    adam_step(params, std::span<const Vector>(&grad, 1), state);
    // m_hat = g, v_hat = g^2 -> step = lr * g / (|g| + eps)
    CHECK(param[0] == doctest::Approx(1.0 - 0.1 * 0.5 / (0.5 + 1e-8)).epsilon(1e-14));
    CHECK(std::abs(param[0] - 0.9) < 1e-7);
}

TEST_CASE("defaults match the documented hyperparameters") {
    AdamState s;
    CHECK(s.learning_rate == 1e-4);
    CHECK(s.beta1 == 0.9);
    CHECK(s.beta2 == 0.999);
    CHECK(s.epsilon == 1e-8);
}

TEST_CASE("100 steps on x^2 from 1 with lr 0.1") {
    Tensor x({1}, Vector::Ones(1), true);
    AdamState state;
    state.learning_rate = 0.1;
    Tensor* params[] = {&x};
    std::vector<double> trace{1.0};
    for (int i = 0; i < 100; ++i) {
        x.zero_grad();
        Tape tape;
        const Var v = tape.watch(x);
        tape.backward(sum(mul(v, v)));
        adam_step(params, state);
        trace.push_back(x.data()[0]);
        CHECK(state.second_moment[0].minCoeff() >= 0.0);
    }
    // Momentum carries the iterate past the minimum, so f decreases
    // monotonically only up to the first sign change; after that the peak
    // |x| of each oscillation lobe must shrink.
    std::size_t k = 1;
    for (; k < trace.size() && trace[k] > 0; ++k) CHECK(trace[k] * trace[k] < trace[k - 1] * trace[k - 1]);
    std::vector<double> lobe_peaks;
    double peak = 0.0;
    for (; k < trace.size(); ++k) {
        if (k > 1 && std::signbit(trace[k]) != std::signbit(trace[k - 1]) && peak > 0) {
            lobe_peaks.push_back(peak);
            peak = 0.0;
        }
        peak = std::max(peak, std::abs(trace[k]));
    }
    REQUIRE(lobe_peaks.size() >= 3);
    for (std::size_t i = 1; i < lobe_peaks.size(); ++i) CHECK(lobe_peaks[i] < lobe_peaks[i - 1]);
    CHECK(std::abs(trace.back()) < 0.1);
}

TEST_CASE("adam rejects mismatched lengths") {
    Vector a = Vector::Zero(2);
    Vector g = Vector::Zero(3);
    AdamState state;
    Vector* params[] = {&a};
    CHECK_THROWS_AS(adam_step(params, std::span<const Vector>(&g, 1), state), ContractError);
    Vector ok = Vector::Zero(2);
    adam_step(params, std::span<const Vector>(&ok, 1), state);
    Vector b = Vector::Zero(2);
    Vector* two[] = {&a, &b};
    Vector grads[] = {ok, ok};
    CHECK_THROWS_AS(adam_step(two, grads, state), ContractError);
}

TEST_CASE("gradient checker flags a wrong backward rule") {
    Tensor x({3}, Vector::LinSpaced(3, 0.2, 0.9), true);
    // correct rule
    auto good = check_gradients([](Tape&, std::span<const Var> v) { return sum(mul(v[0], v[0])); },
                                std::vector<Tensor*>{&x});
    CHECK(good.max_relative_error < 1e-7);
    CHECK(good.checked == 3);
    // a deliberately wrong rule: forward x^2 but backward of x
    auto bad = check_gradients(
        [](Tape& tape, std::span<const Var> v) {
            const std::size_t id = v[0].id();
            const Var sq = tape.record("wrong_square", v[0].shape(), v[0].value().array().square().matrix(), {id},
                                       [id](const Vector& g, Tape& t) { t.accumulate(id, g); });
            return sum(sq);
        },
        std::vector<Tensor*>{&x});
    CHECK(bad.max_relative_error > 0.1);
    CHECK_FALSE(x.grad().has_value());
}

TEST_CASE("step ladder forgives a straddled kink but not a wrong rule") {
    // relu(x) at 0.5e-5 away from the kink: the first stencil straddles it
    Tensor x({1}, Vector::Constant(1, 5e-6), true);
    const auto relu_sum = [](Tape&, std::span<const Var> v) { return sum(relu(v[0])); };
    auto coarse = check_gradients(relu_sum, std::vector<Tensor*>{&x}, {.step = 1e-5});
    CHECK(coarse.max_relative_error > 0.1);
    auto ladder = check_gradients(relu_sum, std::vector<Tensor*>{&x}, {.step = 1e-5, .step_ladder = 3});
    CHECK(ladder.max_relative_error < 1e-9);

    auto wrong = check_gradients(
        [](Tape& tape, std::span<const Var> v) {
            const std::size_t id = v[0].id();
            const Var y = tape.record("half_slope", v[0].shape(), v[0].value(), {id},
                                      [id](const Vector& g, Tape& t) { t.accumulate(id, 0.5 * g); });
            return sum(y);
        },
        std::vector<Tensor*>{&x}, {.step = 1e-5, .step_ladder = 4});
    CHECK(wrong.max_relative_error > 0.4);
}
