#pragma once

#include <Eigen/Core>

#include <cstddef>
#include <functional>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

namespace fogkit::ad {

using Index = Eigen::Index;
using Shape = std::vector<Index>;
using Vector = Eigen::VectorXd;
using RowMatrix = Eigen::Matrix<double, Eigen::Dynamic, Eigen::Dynamic, Eigen::RowMajor>;

Index element_count(const Shape& shape);
std::string to_string(const Shape& shape);

/// Dense row-major N-D array of doubles. Holds learnable parameters and
/// inputs; intermediate values live on a Tape.
class Tensor {
public:
    Tensor() = default;
    explicit Tensor(Shape shape, bool requires_grad = false);
    Tensor(Shape shape, Vector data, bool requires_grad = false);

    static Tensor scalar(double value);

    const Shape& shape() const { return shape_; }
    Index rank() const { return static_cast<Index>(shape_.size()); }
    Index size() const { return data_.size(); }

    Vector& data() { return data_; }
    const Vector& data() const { return data_; }
    double operator[](Index i) const { return data_[i]; }

    bool requires_grad() const { return requires_grad_; }
    void set_requires_grad(bool on) { requires_grad_ = on; }

    const std::optional<Vector>& grad() const { return grad_; }
    void zero_grad() { grad_.reset(); }
    void accumulate_grad(const Vector& g);

private:
    Shape shape_;
    Vector data_;
    bool requires_grad_ = false;
    std::optional<Vector> grad_;
};

class Tape;

/// Handle to a node recorded on a Tape.
class Var {
public:
    Var() = default;
    Var(Tape* tape, std::size_t id) : tape_(tape), id_(id) {}

    Tape& tape() const { return *tape_; }
    std::size_t id() const { return id_; }
    const Shape& shape() const;
    const Vector& value() const;
    Index size() const { return value().size(); }
    Index rank() const { return static_cast<Index>(shape().size()); }
    /// Scalar value; only valid for single-element nodes.
    double item() const;

private:
    Tape* tape_ = nullptr;
    std::size_t id_ = 0;
};

/// Records the forward computation of one pass and replays it backwards.
///
/// A tape is single use: backward() propagates gradients into every watched
/// Tensor that requires them and then clears all recorded nodes.
class Tape {
public:
    /// Receives the node's output gradient; accumulates into input grads.
    using BackwardFn = std::function<void(const Vector& grad_out, Tape& tape)>;

    Tape() = default;
    Tape(const Tape&) = delete;
    Tape& operator=(const Tape&) = delete;

    Var constant(Tensor value);
    Var constant(Shape shape, Vector value);
    /// Leaf bound to an external tensor; backward adds into tensor.grad().
    Var watch(Tensor& tensor);

    Var record(std::string_view op, Shape shape, Vector value,
               std::vector<std::size_t> inputs, BackwardFn backward);

    void backward(Var loss);

    bool needs_grad(std::size_t id) const { return nodes_.at(id).needs_grad; }
    /// Adds `g` into the gradient buffer of node `id` (no-op if the node
    /// does not need a gradient).
    void accumulate(std::size_t id, const Vector& g);
    template <typename Fn>
    void accumulate_with(std::size_t id, Fn&& fill);

    const Shape& shape(std::size_t id) const { return nodes_.at(id).shape; }
    const Vector& value(std::size_t id) const { return nodes_.at(id).value; }
    const std::string& op_name(std::size_t id) const { return nodes_.at(id).op; }
    std::size_t size() const { return nodes_.size(); }

    /// Description of the earliest node holding a NaN or Inf, if any.
    std::optional<std::string> first_non_finite() const;

private:
    struct Node {
        std::string op;
        Shape shape;
        Vector value;
        std::vector<std::size_t> inputs;
        BackwardFn backward;
        bool needs_grad = false;
        Tensor* watched = nullptr;
        std::optional<Vector> grad;
    };

    Vector& grad_buffer(std::size_t id);

    std::vector<Node> nodes_;
};

template <typename Fn>
void Tape::accumulate_with(std::size_t id, Fn&& fill) {
    if (!nodes_.at(id).needs_grad) return;
    fill(grad_buffer(id));
}

}  // namespace fogkit::ad
