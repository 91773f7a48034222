#include "fogkit/autodiff/tensor.hpp"

#include "fogkit/errors.hpp"

#include <sstream>

namespace fogkit::ad {

Index element_count(const Shape& shape) {
    Index n = 1;
    for (Index d : shape) {
        if (d <= 0) throw ShapeError("shape " + to_string(shape) + " has a non-positive dimension");
        n *= d;
    }
    return n;
}

std::string to_string(const Shape& shape) {
    std::ostringstream os;
    os << '[';
    for (std::size_t i = 0; i < shape.size(); ++i) {
        if (i) os << ',';
        os << shape[i];
    }
    os << ']';
    return os.str();
}

Tensor::Tensor(Shape shape, bool requires_grad)
    : shape_(std::move(shape)), data_(Vector::Zero(element_count(shape_))), requires_grad_(requires_grad) {}

Tensor::Tensor(Shape shape, Vector data, bool requires_grad)
    : shape_(std::move(shape)), data_(std::move(data)), requires_grad_(requires_grad) {
    if (element_count(shape_) != data_.size())
        throw ShapeError("tensor data length " + std::to_string(data_.size()) + " does not match shape " +
                         to_string(shape_));
}

Tensor Tensor::scalar(double value) { return Tensor({1}, Vector::Constant(1, value)); }

void Tensor::accumulate_grad(const Vector& g) {
    if (g.size() != data_.size()) throw ShapeError("gradient length does not match tensor " + to_string(shape_));
    if (grad_)
        *grad_ += g;
    else
        grad_ = g;
}

const Shape& Var::shape() const { return tape_->shape(id_); }
const Vector& Var::value() const { return tape_->value(id_); }

double Var::item() const {
    const auto& v = value();
    if (v.size() != 1) throw ContractError("item() on a tensor of shape " + to_string(shape()));
    return v[0];
}

Var Tape::constant(Tensor value) {
    Node n;
    n.op = "constant";
    n.shape = value.shape();
    n.value = std::move(value.data());
    nodes_.push_back(std::move(n));
    return {this, nodes_.size() - 1};
}

Var Tape::constant(Shape shape, Vector value) { return constant(Tensor(std::move(shape), std::move(value))); }

Var Tape::watch(Tensor& tensor) {
    Node n;
    n.op = "leaf";
    n.shape = tensor.shape();
    n.value = tensor.data();
    n.needs_grad = tensor.requires_grad();
    n.watched = &tensor;
    nodes_.push_back(std::move(n));
    return {this, nodes_.size() - 1};
}

Var Tape::record(std::string_view op, Shape shape, Vector value, std::vector<std::size_t> inputs,
                 BackwardFn backward) {
    if (element_count(shape) != value.size())
        throw ShapeError(std::string(op) + ": output length does not match shape " + to_string(shape));
    Node n;
    n.op = std::string(op);
    n.shape = std::move(shape);
    n.value = std::move(value);
    for (std::size_t in : inputs) {
        if (in >= nodes_.size()) throw ContractError(std::string(op) + ": input node is not on this tape");
        n.needs_grad = n.needs_grad || nodes_[in].needs_grad;
    }
    n.inputs = std::move(inputs);
    if (n.needs_grad) n.backward = std::move(backward);
#ifndef NDEBUG
    if (!n.value.allFinite()) {
        bool inputs_finite = true;
        for (std::size_t in : n.inputs) inputs_finite = inputs_finite && nodes_[in].value.allFinite();
        if (inputs_finite) throw NumericalError(n.op + " produced a non-finite value from finite inputs");
    }
#endif
    nodes_.push_back(std::move(n));
    return {this, nodes_.size() - 1};
}

Vector& Tape::grad_buffer(std::size_t id) {
    auto& node = nodes_.at(id);
    if (!node.grad) node.grad = Vector::Zero(node.value.size());
    return *node.grad;
}

void Tape::accumulate(std::size_t id, const Vector& g) {
    if (!nodes_.at(id).needs_grad) return;
    grad_buffer(id) += g;
}

void Tape::backward(Var loss) {
    if (&loss.tape() != this) throw ContractError("backward: loss belongs to another tape");
    if (loss.size() != 1)
        throw ContractError("backward: loss must be a scalar, got shape " + to_string(loss.shape()));
    if (nodes_.at(loss.id()).needs_grad) {
        grad_buffer(loss.id()).setOnes();
        for (std::size_t id = loss.id() + 1; id-- > 0;) {
            auto& node = nodes_[id];
            if (!node.grad) continue;
            if (node.backward) {
                const Vector g = std::move(*node.grad);
                node.grad.reset();
                node.backward(g, *this);
                if (node.watched) node.watched->accumulate_grad(g);
            } else if (node.watched) {
                node.watched->accumulate_grad(*node.grad);
            }
        }
    }
    nodes_.clear();
}

std::optional<std::string> Tape::first_non_finite() const {
    for (std::size_t id = 0; id < nodes_.size(); ++id) {
        if (!nodes_[id].value.allFinite())
            return "op '" + nodes_[id].op + "' (node " + std::to_string(id) + ", shape " +
                   to_string(nodes_[id].shape) + ")";
    }
    return std::nullopt;
}

}  // namespace fogkit::ad
