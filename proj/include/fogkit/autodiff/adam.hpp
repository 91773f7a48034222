#pragma once

#include "fogkit/autodiff/tensor.hpp"

#include <cstdint>
#include <span>
#include <vector>

namespace fogkit::ad {

struct AdamState {
    double learning_rate = 1e-4;
    double beta1 = 0.9;
    double beta2 = 0.999;
    double epsilon = 1e-8;
    std::int64_t step = 0;
    std::vector<Vector> first_moment;   // m, one per parameter
    std::vector<Vector> second_moment;  // v, one per parameter
};

/// One bias-corrected ADAM update. Moments are allocated on the first call;
/// every later call must pass parameters of the same lengths in the same order.
void adam_step(std::span<Vector* const> params, std::span<const Vector> grads, AdamState& state);

/// Same update driven by each tensor's accumulated gradient; a tensor with
/// no gradient is treated as having a zero gradient.
void adam_step(std::span<Tensor* const> params, AdamState& state);

}  // namespace fogkit::ad
