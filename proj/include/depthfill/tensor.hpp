#pragma once

#include <cstdint>
#include <functional>
#include <memory>
#include <span>
#include <string>
#include <vector>

#include "depthfill/error.hpp"
#include "depthfill/rng.hpp"

namespace depthfill {

// Dense 64-bit tensor participating in a reverse-mode differentiation graph.
// Each operation records its inputs and a backward closure on the output
// node; backward() walks the reachable records once, in reverse execution
// order. Tensors are cheap shared handles; copying shares storage.
class Tensor {
public:
    struct Node {
        std::vector<int> shape;
        std::vector<double> data;
        std::vector<double> grad;  // sized on demand during backward
        bool requires_grad = false;
        uint64_t seq = 0;  // creation order; backward sorts on this
        std::vector<std::shared_ptr<Node>> parents;
        std::function<void(Node&)> backward_fn;
        int numel() const { return static_cast<int>(data.size()); }
    };

    Tensor() = default;

    static Tensor zeros(const std::vector<int>& shape, bool requires_grad = false);
    static Tensor full(const std::vector<int>& shape, double value, bool requires_grad = false);
    static Tensor from_data(const std::vector<int>& shape, std::vector<double> data,
                            bool requires_grad = false);
    static Tensor scalar(double v, bool requires_grad = false);
    // Uniform init in [-s, s], s = sqrt(6 / fan_in).
    static Tensor uniform_he(const std::vector<int>& shape, int fan_in, Rng& rng,
                             bool requires_grad = true);

    bool defined() const { return node_ != nullptr; }
    const std::vector<int>& shape() const { return node_->shape; }
    int numel() const { return node_->numel(); }
    bool requires_grad() const { return node_->requires_grad; }

    std::vector<double>& data() { return node_->data; }
    const std::vector<double>& data() const { return node_->data; }
    // Empty until a backward pass reaches this tensor.
    const std::vector<double>& grad() const { return node_->grad; }
    std::vector<double>& grad() { return node_->grad; }

    double value() const;  // scalar convenience accessor
    void zero_grad() { node_->grad.assign(node_->data.size(), 0.0); }
    void clear_grad() { node_->grad.clear(); }

    // Reverse-mode pass from a scalar. Every reachable requires_grad tensor
    // ends with a populated grad buffer.
    void backward() const;

    std::shared_ptr<Node> node() const { return node_; }

private:
    explicit Tensor(std::shared_ptr<Node> n) : node_(std::move(n)) {}
    std::shared_ptr<Node> node_;

    friend Tensor make_op_output(std::vector<int> shape, std::vector<double> data,
                                 std::vector<Tensor> parents,
                                 std::function<void(Tensor::Node&)> backward_fn);
};

// Builds an op output node. The backward closure reads node.grad and
// accumulates into the parents' grads. Exposed for custom ops (chamfer).
Tensor make_op_output(std::vector<int> shape, std::vector<double> data,
                      std::vector<Tensor> parents, std::function<void(Tensor::Node&)> backward_fn);

// --- differentiable operations ------------------------------------------

Tensor matmul(const Tensor& a, const Tensor& b);
// input C×H×W, kernel O×C×k×k with k in {1,3}; pad = k/2; stride 1 or 2.
Tensor conv2d(const Tensor& input, const Tensor& kernel, int stride);
Tensor add_channel_bias(const Tensor& x, const Tensor& bias);  // C×H×W + [C]
Tensor relu(const Tensor& x);
Tensor upsample_nearest2x(const Tensor& x);        // C×H×W -> C×2H×2W
Tensor maxpool_points(const Tensor& x);            // N×F -> F, first-argmax ties
Tensor concat(const std::vector<Tensor>& xs, int axis);
Tensor add(const Tensor& a, const Tensor& b);      // same shape
Tensor mul(const Tensor& a, const Tensor& b);      // elementwise, same shape
Tensor mul_scalar(const Tensor& a, double s);
Tensor add_rowvec(const Tensor& x, const Tensor& bias);  // N×F + [F]
Tensor repeat_rows(const Tensor& x, int k);        // N×F -> (N·k)×F, grad sums replicas
Tensor reshape(const Tensor& x, const std::vector<int>& shape);
Tensor sum(const Tensor& x);                       // -> scalar
// sum(mask * (pred - target)^2) / sum(mask); all-zero mask is degenerate.
Tensor mse_masked(const Tensor& pred, const Tensor& target, const Tensor& mask);

// --- gradient verification ----------------------------------------------

// Central finite differences against backward gradients. `build` must
// reconstruct the scalar loss from the current parameter values each call.
// Returns the max over coordinates of |fd - analytic| / max(1, |fd|, |an|).
double grad_check(const std::function<Tensor()>& build, std::span<Tensor> params, double eps);
double grad_check(const std::function<Tensor()>& build, Tensor param, double eps);
bool grad_check_ok(const std::function<Tensor()>& build, std::span<Tensor> params, double eps,
                   double tol);

std::string shape_str(const std::vector<int>& shape);

}  // namespace depthfill
