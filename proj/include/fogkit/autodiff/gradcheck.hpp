#pragma once

#include "fogkit/autodiff/tensor.hpp"

#include <cstdint>
#include <functional>
#include <span>

namespace fogkit::ad {

/// Builds a scalar loss on `tape` from the watched inputs (same order as
/// passed to check_gradients).
using LossBuilder = std::function<Var(Tape& tape, std::span<const Var> inputs)>;

struct GradCheckOptions {
    double step = 1e-5;             ///< central-difference half width
    Index samples_per_tensor = 0;   ///< 0 checks every entry
    std::uint64_t seed = 0;         ///< picks the sampled entries
    double denominator_floor = 1e-6;  ///< times max(1, largest |analytic| entry)
    /// Each entry is also retried at step/10, step/100, ... (this many steps in
    /// total) and the closest estimate is kept. Every rung converges to the true
    /// derivative, so this only forgives stencils that straddle a kink.
    int step_ladder = 1;
};

struct GradCheckReport {
    double max_relative_error = 0.0;
    std::size_t worst_tensor = 0;
    Index worst_index = 0;
    double analytic = 0.0;
    double numeric = 0.0;
    Index checked = 0;
};

/// Compares reverse-mode gradients against central finite differences.
/// Relative error is |a - n| / max(|a|, |n|, floor), where the floor is
/// denominator_floor scaled by the largest analytic gradient entry. The
/// inputs' data and grads are restored on return.
GradCheckReport check_gradients(const LossBuilder& build, std::span<Tensor* const> inputs,
                                const GradCheckOptions& options = {});

}  // namespace fogkit::ad
