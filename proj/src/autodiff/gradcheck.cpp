#include "fogkit/autodiff/gradcheck.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <optional>
#include <random>

namespace fogkit::ad {
namespace {

double evaluate(const LossBuilder& build, std::span<Tensor* const> inputs) {
    Tape tape;
    std::vector<Var> vars;
    for (Tensor* t : inputs) vars.push_back(tape.watch(*t));
    return build(tape, vars).item();
}

}  // namespace

GradCheckReport check_gradients(const LossBuilder& build, std::span<Tensor* const> inputs,
                                const GradCheckOptions& options) {
    std::vector<bool> required;
    std::vector<std::optional<Vector>> saved_grads;
    for (Tensor* t : inputs) {
        required.push_back(t->requires_grad());
        saved_grads.push_back(t->grad());
        t->zero_grad();
        t->set_requires_grad(true);
    }

    {
        Tape tape;
        std::vector<Var> vars;
        for (Tensor* t : inputs) vars.push_back(tape.watch(*t));
        tape.backward(build(tape, vars));
    }
    std::vector<Vector> analytic;
    for (Tensor* t : inputs) {
        analytic.push_back(t->grad() ? *t->grad() : Vector::Zero(t->size()));
        t->set_requires_grad(false);
    }

    double scale = 1.0;
    for (const Vector& g : analytic) scale = std::max(scale, g.cwiseAbs().maxCoeff());
    const double floor = options.denominator_floor * scale;

    GradCheckReport report;
    std::mt19937_64 rng(options.seed);
    for (std::size_t k = 0; k < inputs.size(); ++k) {
        Tensor& t = *inputs[k];
        std::vector<Index> entries(static_cast<std::size_t>(t.size()));
        std::iota(entries.begin(), entries.end(), Index{0});
        if (options.samples_per_tensor > 0 && options.samples_per_tensor < t.size()) {
            std::shuffle(entries.begin(), entries.end(), rng);
            entries.resize(static_cast<std::size_t>(options.samples_per_tensor));
            std::sort(entries.begin(), entries.end());
        }
        for (Index i : entries) {
            const double original = t.data()[i];
            const double a = analytic[k][i];
            double numeric = 0.0, rel = 0.0;
            double h = options.step;
            for (int rung = 0; rung < std::max(options.step_ladder, 1); ++rung, h /= 10.0) {
                t.data()[i] = original + h;
                const double up = evaluate(build, inputs);
                t.data()[i] = original - h;
                const double down = evaluate(build, inputs);
                t.data()[i] = original;
                const double n = (up - down) / (2.0 * h);
                const double r = std::abs(a - n) / std::max({std::abs(a), std::abs(n), floor});
                if (rung == 0 || r < rel) {
                    rel = r;
                    numeric = n;
                }
            }
            ++report.checked;
            if (rel > report.max_relative_error || report.checked == 1) {
                report.max_relative_error = rel;
                report.worst_tensor = k;
                report.worst_index = i;
                report.analytic = a;
                report.numeric = numeric;
            }
        }
    }

    for (std::size_t k = 0; k < inputs.size(); ++k) {
        inputs[k]->set_requires_grad(required[k]);
        inputs[k]->zero_grad();
        if (saved_grads[k]) inputs[k]->accumulate_grad(*saved_grads[k]);
    }
    return report;
}

}  // namespace fogkit::ad
