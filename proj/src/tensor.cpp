#include "depthfill/tensor.hpp"

#include <algorithm>
#include <atomic>
#include <cmath>
#include <unordered_set>

namespace depthfill {

namespace {

std::atomic<uint64_t> g_seq{1};

int checked_numel(const std::vector<int>& shape) {
    long long n = 1;
    for (int e : shape) {
        if (e <= 0) throw DimensionError("tensor extent must be positive, got " + shape_str(shape));
        n *= e;
    }
    return static_cast<int>(n);
}

std::shared_ptr<Tensor::Node> new_node(std::vector<int> shape, std::vector<double> data,
                                       bool requires_grad) {
    auto n = std::make_shared<Tensor::Node>();
    n->shape = std::move(shape);
    n->data = std::move(data);
    n->requires_grad = requires_grad;
    n->seq = g_seq.fetch_add(1, std::memory_order_relaxed);
    return n;
}

void ensure_grad(Tensor::Node& n) {
    if (n.grad.size() != n.data.size()) n.grad.assign(n.data.size(), 0.0);
}

}  // namespace

std::string shape_str(const std::vector<int>& shape) {
    std::string s = "[";
    for (size_t i = 0; i < shape.size(); ++i) {
        if (i) s += "x";
        s += std::to_string(shape[i]);
    }
    return s + "]";
}

Tensor make_op_output(std::vector<int> shape, std::vector<double> data,
                      std::vector<Tensor> parents, std::function<void(Tensor::Node&)> backward_fn) {
    bool rg = false;
    for (const auto& p : parents) rg = rg || p.requires_grad();
    auto n = new_node(std::move(shape), std::move(data), rg);
    if (rg) {
        for (const auto& p : parents) n->parents.push_back(p.node());
        n->backward_fn = std::move(backward_fn);
    }
    return Tensor(std::move(n));
}

Tensor Tensor::zeros(const std::vector<int>& shape, bool requires_grad) {
    int n = checked_numel(shape);
    return Tensor(new_node(shape, std::vector<double>(n, 0.0), requires_grad));
}

Tensor Tensor::full(const std::vector<int>& shape, double value, bool requires_grad) {
    int n = checked_numel(shape);
    return Tensor(new_node(shape, std::vector<double>(n, value), requires_grad));
}

Tensor Tensor::from_data(const std::vector<int>& shape, std::vector<double> data,
                         bool requires_grad) {
    int n = checked_numel(shape);
    if (static_cast<size_t>(n) != data.size())
        throw DimensionError("data length " + std::to_string(data.size()) +
                             " does not match shape " + shape_str(shape));
    return Tensor(new_node(shape, std::move(data), requires_grad));
}

Tensor Tensor::scalar(double v, bool requires_grad) {
    return Tensor(new_node({1}, {v}, requires_grad));
}

Tensor Tensor::uniform_he(const std::vector<int>& shape, int fan_in, Rng& rng,
                          bool requires_grad) {
    int n = checked_numel(shape);
    double s = std::sqrt(6.0 / static_cast<double>(fan_in));
    std::vector<double> data(n);
    for (double& v : data) v = rng.uniform(-s, s);
    return Tensor(new_node(shape, std::move(data), requires_grad));
}

double Tensor::value() const {
    if (numel() != 1)
        throw DimensionError("value() requires a scalar tensor, got " + shape_str(shape()));
    return node_->data[0];
}

void Tensor::backward() const {
    if (!node_ || numel() != 1)
        throw DimensionError("backward() requires a scalar root, got " +
                             (node_ ? shape_str(shape()) : std::string("<empty>")));

    // Collect the reachable graph, then replay its records in reverse
    // execution order (descending seq). Each record fires exactly once.
    std::vector<Tensor::Node*> order;
    std::unordered_set<Tensor::Node*> seen;
    std::vector<Tensor::Node*> stack{node_.get()};
    seen.insert(node_.get());
    while (!stack.empty()) {
        Tensor::Node* n = stack.back();
        stack.pop_back();
        order.push_back(n);
        for (const auto& p : n->parents) {
            if (seen.insert(p.get()).second) stack.push_back(p.get());
        }
    }
    std::sort(order.begin(), order.end(),
              [](const Tensor::Node* a, const Tensor::Node* b) { return a->seq > b->seq; });

    for (Tensor::Node* n : order) {
        if (n->requires_grad) ensure_grad(*n);
    }
    node_->grad.assign(1, 1.0);
    for (Tensor::Node* n : order) {
        if (n->backward_fn) n->backward_fn(*n);
    }
}

// --- ops -------------------------------------------------------------------

Tensor matmul(const Tensor& a, const Tensor& b) {
    if (a.shape().size() != 2 || b.shape().size() != 2 || a.shape()[1] != b.shape()[0])
        throw DimensionError("matmul shape mismatch: " + shape_str(a.shape()) + " x " +
                             shape_str(b.shape()));
    const int m = a.shape()[0], k = a.shape()[1], n = b.shape()[1];
    std::vector<double> out(static_cast<size_t>(m) * n, 0.0);
    const double* pa = a.data().data();
    const double* pb = b.data().data();
    for (int i = 0; i < m; ++i) {
        double* po = out.data() + static_cast<size_t>(i) * n;
        for (int t = 0; t < k; ++t) {
            const double av = pa[static_cast<size_t>(i) * k + t];
            const double* pbr = pb + static_cast<size_t>(t) * n;
            for (int j = 0; j < n; ++j) po[j] += av * pbr[j];
        }
    }
    auto an = a.node(), bn = b.node();
    return make_op_output(
        {m, n}, std::move(out), {a, b}, [an, bn, m, k, n](Tensor::Node& node) {
            const double* g = node.grad.data();
            if (an->requires_grad) {
                // dA = G * B^T
                double* ga = an->grad.data();
                const double* pb = bn->data.data();
                for (int i = 0; i < m; ++i)
                    for (int t = 0; t < k; ++t) {
                        double acc = 0.0;
                        const double* gr = g + static_cast<size_t>(i) * n;
                        const double* br = pb + static_cast<size_t>(t) * n;
                        for (int j = 0; j < n; ++j) acc += gr[j] * br[j];
                        ga[static_cast<size_t>(i) * k + t] += acc;
                    }
            }
            if (bn->requires_grad) {
                // dB = A^T * G
                double* gb = bn->grad.data();
                const double* pa = an->data.data();
                for (int t = 0; t < k; ++t)
                    for (int i = 0; i < m; ++i) {
                        const double av = pa[static_cast<size_t>(i) * k + t];
                        const double* gr = g + static_cast<size_t>(i) * n;
                        double* gbr = gb + static_cast<size_t>(t) * n;
                        for (int j = 0; j < n; ++j) gbr[j] += av * gr[j];
                    }
            }
        });
}

Tensor conv2d(const Tensor& input, const Tensor& kernel, int stride) {
    const auto& is = input.shape();
    const auto& ks = kernel.shape();
    if (is.size() != 3 || ks.size() != 4)
        throw DimensionError("conv2d expects C×H×W input and O×C×k×k kernel, got " +
                             shape_str(is) + " and " + shape_str(ks));
    const int C = is[0], H = is[1], W = is[2];
    const int O = ks[0], KC = ks[1], kh = ks[2], kw = ks[3];
    if (KC != C)
        throw DimensionError("conv2d channel mismatch: input " + shape_str(is) + " vs kernel " +
                             shape_str(ks));
    if (kh != kw || (kh != 1 && kh != 3))
        throw DimensionError("conv2d kernel must be 1x1 or 3x3, got " + shape_str(ks));
    if (stride != 1 && stride != 2)
        throw DimensionError("conv2d stride must be 1 or 2, got " + std::to_string(stride));
    if (kh == 3 && (H < 3 || W < 3))
        throw DimensionError("conv2d 3x3 requires H,W >= 3, got " + shape_str(is));
    const int pad = kh / 2;
    const int OH = (H + stride - 1) / stride;
    const int OW = (W + stride - 1) / stride;

    std::vector<double> out(static_cast<size_t>(O) * OH * OW, 0.0);
    const double* pin = input.data().data();
    const double* pk = kernel.data().data();
    for (int o = 0; o < O; ++o) {
        double* po = out.data() + static_cast<size_t>(o) * OH * OW;
        for (int c = 0; c < C; ++c) {
            const double* pic = pin + static_cast<size_t>(c) * H * W;
            for (int ky = 0; ky < kh; ++ky)
                for (int kx = 0; kx < kw; ++kx) {
                    const double wv =
                        pk[((static_cast<size_t>(o) * C + c) * kh + ky) * kw + kx];
                    if (wv == 0.0) continue;
                    for (int oy = 0; oy < OH; ++oy) {
                        const int iy = oy * stride + ky - pad;
                        if (iy < 0 || iy >= H) continue;
                        const double* row = pic + static_cast<size_t>(iy) * W;
                        double* orow = po + static_cast<size_t>(oy) * OW;
                        for (int ox = 0; ox < OW; ++ox) {
                            const int ix = ox * stride + kx - pad;
                            if (ix < 0 || ix >= W) continue;
                            orow[ox] += wv * row[ix];
                        }
                    }
                }
        }
    }
    auto in_n = input.node(), k_n = kernel.node();
    return make_op_output(
        {O, OH, OW}, std::move(out), {input, kernel},
        [in_n, k_n, C, H, W, O, kh, kw, pad, stride, OH, OW](Tensor::Node& node) {
            const double* g = node.grad.data();
            for (int o = 0; o < O; ++o) {
                const double* go = g + static_cast<size_t>(o) * OH * OW;
                for (int c = 0; c < C; ++c) {
                    for (int ky = 0; ky < kh; ++ky)
                        for (int kx = 0; kx < kw; ++kx) {
                            const size_t widx =
                                ((static_cast<size_t>(o) * C + c) * kh + ky) * kw + kx;
                            const double wv = k_n->data[widx];
                            double wacc = 0.0;
                            for (int oy = 0; oy < OH; ++oy) {
                                const int iy = oy * stride + ky - pad;
                                if (iy < 0 || iy >= H) continue;
                                const double* grow = go + static_cast<size_t>(oy) * OW;
                                const size_t inoff = (static_cast<size_t>(c) * H + iy) * W;
                                for (int ox = 0; ox < OW; ++ox) {
                                    const int ix = ox * stride + kx - pad;
                                    if (ix < 0 || ix >= W) continue;
                                    const double gv = grow[ox];
                                    if (in_n->requires_grad) in_n->grad[inoff + ix] += wv * gv;
                                    wacc += in_n->data[inoff + ix] * gv;
                                }
                            }
                            if (k_n->requires_grad) k_n->grad[widx] += wacc;
                        }
                }
            }
        });
}

Tensor add_channel_bias(const Tensor& x, const Tensor& bias) {
    const auto& xs = x.shape();
    if (xs.size() != 3 || bias.shape().size() != 1 || bias.shape()[0] != xs[0])
        throw DimensionError("add_channel_bias shape mismatch: " + shape_str(xs) + " + " +
                             shape_str(bias.shape()));
    const int C = xs[0], HW = xs[1] * xs[2];
    std::vector<double> out(x.data());
    for (int c = 0; c < C; ++c) {
        const double b = bias.data()[c];
        double* po = out.data() + static_cast<size_t>(c) * HW;
        for (int i = 0; i < HW; ++i) po[i] += b;
    }
    auto xn = x.node(), bn = bias.node();
    return make_op_output(xs, std::move(out), {x, bias}, [xn, bn, C, HW](Tensor::Node& node) {
        if (xn->requires_grad)
            for (size_t i = 0; i < node.grad.size(); ++i) xn->grad[i] += node.grad[i];
        if (bn->requires_grad)
            for (int c = 0; c < C; ++c) {
                double acc = 0.0;
                const double* g = node.grad.data() + static_cast<size_t>(c) * HW;
                for (int i = 0; i < HW; ++i) acc += g[i];
                bn->grad[c] += acc;
            }
    });
}

Tensor relu(const Tensor& x) {
    std::vector<double> out(x.data());
    for (double& v : out) v = v > 0.0 ? v : 0.0;
    auto xn = x.node();
    return make_op_output(x.shape(), std::move(out), {x}, [xn](Tensor::Node& node) {
        if (!xn->requires_grad) return;
        for (size_t i = 0; i < node.grad.size(); ++i)
            if (xn->data[i] > 0.0) xn->grad[i] += node.grad[i];
    });
}

Tensor upsample_nearest2x(const Tensor& x) {
    const auto& xs = x.shape();
    if (xs.size() != 3)
        throw DimensionError("upsample_nearest2x expects C×H×W, got " + shape_str(xs));
    const int C = xs[0], H = xs[1], W = xs[2];
    std::vector<double> out(static_cast<size_t>(C) * 4 * H * W);
    const double* pin = x.data().data();
    for (int c = 0; c < C; ++c)
        for (int y = 0; y < 2 * H; ++y) {
            const double* row = pin + (static_cast<size_t>(c) * H + y / 2) * W;
            double* orow = out.data() + (static_cast<size_t>(c) * 2 * H + y) * 2 * W;
            for (int xo = 0; xo < 2 * W; ++xo) orow[xo] = row[xo / 2];
        }
    auto xn = x.node();
    return make_op_output({C, 2 * H, 2 * W}, std::move(out), {x},
                          [xn, C, H, W](Tensor::Node& node) {
                              if (!xn->requires_grad) return;
                              const double* g = node.grad.data();
                              for (int c = 0; c < C; ++c)
                                  for (int y = 0; y < 2 * H; ++y) {
                                      const double* grow =
                                          g + (static_cast<size_t>(c) * 2 * H + y) * 2 * W;
                                      double* xrow =
                                          xn->grad.data() + (static_cast<size_t>(c) * H + y / 2) * W;
                                      for (int xo = 0; xo < 2 * W; ++xo) xrow[xo / 2] += grow[xo];
                                  }
                          });
}

Tensor maxpool_points(const Tensor& x) {
    const auto& xs = x.shape();
    if (xs.size() != 2) throw DimensionError("maxpool_points expects N×F, got " + shape_str(xs));
    const int N = xs[0], F = xs[1];
    if (N < 1) throw EmptyInputError("maxpool_points requires at least one point");
    std::vector<double> out(F);
    std::vector<int> argmax(F, 0);
    const double* pin = x.data().data();
    for (int f = 0; f < F; ++f) {
        double best = pin[f];
        int bi = 0;
        for (int i = 1; i < N; ++i) {
            const double v = pin[static_cast<size_t>(i) * F + f];
            if (v > best) {  // strict: ties keep the first occurrence
                best = v;
                bi = i;
            }
        }
        out[f] = best;
        argmax[f] = bi;
    }
    auto xn = x.node();
    return make_op_output({F}, std::move(out), {x},
                          [xn, F, argmax = std::move(argmax)](Tensor::Node& node) {
                              if (!xn->requires_grad) return;
                              for (int f = 0; f < F; ++f)
                                  xn->grad[static_cast<size_t>(argmax[f]) * F + f] += node.grad[f];
                          });
}

Tensor concat(const std::vector<Tensor>& xs, int axis) {
    if (xs.empty()) throw EmptyInputError("concat requires at least one tensor");
    const auto& s0 = xs[0].shape();
    const int rank = static_cast<int>(s0.size());
    if (axis < 0 || axis >= rank)
        throw DimensionError("concat axis " + std::to_string(axis) + " out of range for rank " +
                             std::to_string(rank));
    std::vector<int> out_shape = s0;
    out_shape[axis] = 0;
    for (const auto& t : xs) {
        const auto& s = t.shape();
        if (static_cast<int>(s.size()) != rank)
            throw DimensionError("concat rank mismatch: " + shape_str(s0) + " vs " + shape_str(s));
        for (int d = 0; d < rank; ++d)
            if (d != axis && s[d] != s0[d])
                throw DimensionError("concat non-axis extent mismatch: " + shape_str(s0) + " vs " +
                                     shape_str(s));
        out_shape[axis] += s[axis];
    }
    int outer = 1, inner = 1;
    for (int d = 0; d < axis; ++d) outer *= s0[d];
    for (int d = axis + 1; d < rank; ++d) inner *= s0[d];

    long long total = 1;
    for (int e : out_shape) total *= e;
    std::vector<double> out(static_cast<size_t>(total));
    const int out_axis = out_shape[axis];
    int offset = 0;
    for (const auto& t : xs) {
        const int a = t.shape()[axis];
        const double* pin = t.data().data();
        for (int ou = 0; ou < outer; ++ou)
            std::copy(pin + static_cast<size_t>(ou) * a * inner,
                      pin + static_cast<size_t>(ou + 1) * a * inner,
                      out.begin() + (static_cast<size_t>(ou) * out_axis + offset) * inner);
        offset += a;
    }
    std::vector<std::shared_ptr<Tensor::Node>> nodes;
    std::vector<int> axes;
    for (const auto& t : xs) {
        nodes.push_back(t.node());
        axes.push_back(t.shape()[axis]);
    }
    return make_op_output(
        out_shape, std::move(out), xs,
        [nodes = std::move(nodes), axes = std::move(axes), outer, inner,
         out_axis](Tensor::Node& node) {
            int offset = 0;
            for (size_t i = 0; i < nodes.size(); ++i) {
                const int a = axes[i];
                if (nodes[i]->requires_grad) {
                    double* gp = nodes[i]->grad.data();
                    const double* g = node.grad.data();
                    for (int ou = 0; ou < outer; ++ou) {
                        const double* src = g + (static_cast<size_t>(ou) * out_axis + offset) * inner;
                        double* dst = gp + static_cast<size_t>(ou) * a * inner;
                        for (int j = 0; j < a * inner; ++j) dst[j] += src[j];
                    }
                }
                offset += a;
            }
        });
}

Tensor add(const Tensor& a, const Tensor& b) {
    if (a.shape() != b.shape())
        throw DimensionError("add shape mismatch: " + shape_str(a.shape()) + " vs " +
                             shape_str(b.shape()));
    std::vector<double> out(a.data());
    const double* pb = b.data().data();
    for (size_t i = 0; i < out.size(); ++i) out[i] += pb[i];
    auto an = a.node(), bn = b.node();
    return make_op_output(a.shape(), std::move(out), {a, b}, [an, bn](Tensor::Node& node) {
        if (an->requires_grad)
            for (size_t i = 0; i < node.grad.size(); ++i) an->grad[i] += node.grad[i];
        if (bn->requires_grad)
            for (size_t i = 0; i < node.grad.size(); ++i) bn->grad[i] += node.grad[i];
    });
}

Tensor mul(const Tensor& a, const Tensor& b) {
    if (a.shape() != b.shape())
        throw DimensionError("mul shape mismatch: " + shape_str(a.shape()) + " vs " +
                             shape_str(b.shape()));
    std::vector<double> out(a.data());
    const double* pb = b.data().data();
    for (size_t i = 0; i < out.size(); ++i) out[i] *= pb[i];
    auto an = a.node(), bn = b.node();
    return make_op_output(a.shape(), std::move(out), {a, b}, [an, bn](Tensor::Node& node) {
        if (an->requires_grad)
            for (size_t i = 0; i < node.grad.size(); ++i) an->grad[i] += node.grad[i] * bn->data[i];
        if (bn->requires_grad)
            for (size_t i = 0; i < node.grad.size(); ++i) bn->grad[i] += node.grad[i] * an->data[i];
    });
}

Tensor mul_scalar(const Tensor& a, double s) {
    std::vector<double> out(a.data());
    for (double& v : out) v *= s;
    auto an = a.node();
    return make_op_output(a.shape(), std::move(out), {a}, [an, s](Tensor::Node& node) {
        if (!an->requires_grad) return;
        for (size_t i = 0; i < node.grad.size(); ++i) an->grad[i] += node.grad[i] * s;
    });
}

Tensor add_rowvec(const Tensor& x, const Tensor& bias) {
    const auto& xs = x.shape();
    if (xs.size() != 2 || bias.shape().size() != 1 || bias.shape()[0] != xs[1])
        throw DimensionError("add_rowvec shape mismatch: " + shape_str(xs) + " + " +
                             shape_str(bias.shape()));
    const int N = xs[0], F = xs[1];
    std::vector<double> out(x.data());
    const double* pb = bias.data().data();
    for (int i = 0; i < N; ++i) {
        double* row = out.data() + static_cast<size_t>(i) * F;
        for (int f = 0; f < F; ++f) row[f] += pb[f];
    }
    auto xn = x.node(), bn = bias.node();
    return make_op_output(xs, std::move(out), {x, bias}, [xn, bn, N, F](Tensor::Node& node) {
        if (xn->requires_grad)
            for (size_t i = 0; i < node.grad.size(); ++i) xn->grad[i] += node.grad[i];
        if (bn->requires_grad)
            for (int i = 0; i < N; ++i) {
                const double* g = node.grad.data() + static_cast<size_t>(i) * F;
                for (int f = 0; f < F; ++f) bn->grad[f] += g[f];
            }
    });
}

Tensor repeat_rows(const Tensor& x, int k) {
    const auto& xs = x.shape();
    if (xs.size() != 2) throw DimensionError("repeat_rows expects N×F, got " + shape_str(xs));
    if (k < 1) throw DimensionError("repeat_rows count must be >= 1, got " + std::to_string(k));
    const int N = xs[0], F = xs[1];
    std::vector<double> out(static_cast<size_t>(N) * k * F);
    const double* pin = x.data().data();
    for (int i = 0; i < N; ++i)
        for (int r = 0; r < k; ++r)
            std::copy(pin + static_cast<size_t>(i) * F, pin + static_cast<size_t>(i + 1) * F,
                      out.begin() + (static_cast<size_t>(i) * k + r) * F);
    auto xn = x.node();
    return make_op_output({N * k, F}, std::move(out), {x}, [xn, N, k, F](Tensor::Node& node) {
        if (!xn->requires_grad) return;
        for (int i = 0; i < N; ++i)
            for (int r = 0; r < k; ++r) {
                const double* g = node.grad.data() + (static_cast<size_t>(i) * k + r) * F;
                double* gx = xn->grad.data() + static_cast<size_t>(i) * F;
                for (int f = 0; f < F; ++f) gx[f] += g[f];
            }
    });
}

Tensor reshape(const Tensor& x, const std::vector<int>& shape) {
    long long n = 1;
    for (int e : shape) n *= e;
    if (n != x.numel())
        throw DimensionError("reshape numel mismatch: " + shape_str(x.shape()) + " -> " +
                             shape_str(shape));
    auto xn = x.node();
    return make_op_output(shape, std::vector<double>(x.data()), {x}, [xn](Tensor::Node& node) {
        if (!xn->requires_grad) return;
        for (size_t i = 0; i < node.grad.size(); ++i) xn->grad[i] += node.grad[i];
    });
}

Tensor sum(const Tensor& x) {
    double acc = 0.0;
    for (double v : x.data()) acc += v;
    auto xn = x.node();
    return make_op_output({1}, {acc}, {x}, [xn](Tensor::Node& node) {
        if (!xn->requires_grad) return;
        const double g = node.grad[0];
        for (double& gv : xn->grad) gv += g;
    });
}

Tensor mse_masked(const Tensor& pred, const Tensor& target, const Tensor& mask) {
    if (pred.shape() != target.shape() || pred.shape() != mask.shape())
        throw DimensionError("mse_masked shape mismatch: " + shape_str(pred.shape()) + ", " +
                             shape_str(target.shape()) + ", " + shape_str(mask.shape()));
    double msum = 0.0;
    for (double m : mask.data()) msum += m;
    if (msum == 0.0) throw DomainError("mse_masked: mask is all zero (degenerate)");
    double acc = 0.0;
    const auto& p = pred.data();
    const auto& t = target.data();
    const auto& m = mask.data();
    for (size_t i = 0; i < p.size(); ++i) {
        const double d = p[i] - t[i];
        acc += m[i] * d * d;
    }
    auto pn = pred.node(), tn = target.node(), mn = mask.node();
    return make_op_output({1}, {acc / msum}, {pred, target, mask},
                          [pn, tn, mn, msum](Tensor::Node& node) {
                              const double g = node.grad[0] * 2.0 / msum;
                              for (size_t i = 0; i < pn->data.size(); ++i) {
                                  const double d = mn->data[i] * (pn->data[i] - tn->data[i]) * g;
                                  if (pn->requires_grad) pn->grad[i] += d;
                                  if (tn->requires_grad) tn->grad[i] -= d;
                              }
                          });
}

// --- grad check --------------------------------------------------------------

double grad_check(const std::function<Tensor()>& build, std::span<Tensor> params, double eps) {
    Tensor out = build();
    if (out.numel() != 1)
        throw DimensionError("grad_check: builder must produce a scalar, got " +
                             shape_str(out.shape()));
    for (auto& p : params) p.zero_grad();
    out.backward();
    std::vector<std::vector<double>> analytic;
    analytic.reserve(params.size());
    for (auto& p : params) analytic.push_back(p.grad());

    double max_err = 0.0;
    for (size_t pi = 0; pi < params.size(); ++pi) {
        auto& p = params[pi];
        for (int i = 0; i < p.numel(); ++i) {
            const double saved = p.data()[i];
            p.data()[i] = saved + eps;
            const double fp = build().value();
            p.data()[i] = saved - eps;
            const double fm = build().value();
            p.data()[i] = saved;
            const double fd = (fp - fm) / (2.0 * eps);
            const double an = analytic[pi][i];
            const double err =
                std::abs(fd - an) / std::max({1.0, std::abs(fd), std::abs(an)});
            max_err = std::max(max_err, err);
        }
        p.clear_grad();
    }
    return max_err;
}

double grad_check(const std::function<Tensor()>& build, Tensor param, double eps) {
    Tensor ps[] = {param};
    return grad_check(build, std::span<Tensor>(ps), eps);
}

bool grad_check_ok(const std::function<Tensor()>& build, std::span<Tensor> params, double eps,
                   double tol) {
    return grad_check(build, params, eps) < tol;
}

}  // namespace depthfill
