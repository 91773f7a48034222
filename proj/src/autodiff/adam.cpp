#include "fogkit/autodiff/adam.hpp"

#include "fogkit/errors.hpp"

#include <cmath>

namespace fogkit::ad {

void adam_step(std::span<Vector* const> params, std::span<const Vector> grads, AdamState& state) {
    if (params.size() != grads.size()) throw ContractError("adam_step: parameter and gradient counts differ");
    if (state.first_moment.empty() && state.step == 0) {
        for (const Vector* p : params) {
            state.first_moment.push_back(Vector::Zero(p->size()));
            state.second_moment.push_back(Vector::Zero(p->size()));
        }
    }
    if (state.first_moment.size() != params.size())
        throw ContractError("adam_step: optimizer state tracks " + std::to_string(state.first_moment.size()) +
                            " parameters, got " + std::to_string(params.size()));
    for (std::size_t i = 0; i < params.size(); ++i) {
        if (params[i]->size() != grads[i].size() || params[i]->size() != state.first_moment[i].size())
            throw ContractError("adam_step: length mismatch for parameter " + std::to_string(i));
    }

    ++state.step;
    const double t = static_cast<double>(state.step);
    const double correction1 = 1.0 - std::pow(state.beta1, t);
    const double correction2 = 1.0 - std::pow(state.beta2, t);
    for (std::size_t i = 0; i < params.size(); ++i) {
        auto m = state.first_moment[i].array();
        auto v = state.second_moment[i].array();
        const auto g = grads[i].array();
        m = state.beta1 * m + (1.0 - state.beta1) * g;
        v = state.beta2 * v + (1.0 - state.beta2) * g.square();
        params[i]->array() -= state.learning_rate * (m / correction1) / ((v / correction2).sqrt() + state.epsilon);
    }
}

void adam_step(std::span<Tensor* const> params, AdamState& state) {
    std::vector<Vector*> values;
    std::vector<Vector> grads;
    values.reserve(params.size());
    grads.reserve(params.size());
    for (Tensor* p : params) {
        values.push_back(&p->data());
        grads.push_back(p->grad() ? *p->grad() : Vector::Zero(p->size()));
    }
    adam_step(values, grads, state);
}

}  // namespace fogkit::ad
