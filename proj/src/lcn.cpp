#include "depthfill/lcn.hpp"

#include <atomic>

#include "depthfill/chamfer.hpp"

namespace depthfill {

namespace {
std::atomic<long long> g_forward_calls{0};
}

std::vector<int> LcnConfig::resolved_decoder_dims() const {
    if (!decoder_dims.empty()) return decoder_dims;
    return {global_dim + 5, 128, 64, 3};
}

void LcnConfig::validate() const {
    if (pointnet_dims.size() < 2 || pointnet_dims.front() != 3)
        throw DimensionError("pointnet_dims must start at 3 with at least one layer");
    if (pointnet_dims.back() != global_dim)
        throw DimensionError("global_dim must equal the last pointnet width");
    const auto dec = resolved_decoder_dims();
    if (dec.size() < 2 || dec.front() != global_dim + 5 || dec.back() != 3)
        throw DimensionError("decoder dims must run from global_dim+5 to 3");
    if (patch_side < 1) throw DimensionError("patch_side must be >= 1");
    if (grid_extent <= 0.0) throw DimensionError("grid_extent must be positive");
}

std::vector<std::pair<std::string, Tensor>> LcnParams::named_params() const {
    std::vector<std::pair<std::string, Tensor>> out;
    for (size_t i = 0; i < encoder.size(); ++i) {
        out.emplace_back("lcn.enc" + std::to_string(i) + ".w", encoder[i].w);
        out.emplace_back("lcn.enc" + std::to_string(i) + ".b", encoder[i].b);
    }
    for (size_t i = 0; i < decoder.size(); ++i) {
        out.emplace_back("lcn.dec" + std::to_string(i) + ".w", decoder[i].w);
        out.emplace_back("lcn.dec" + std::to_string(i) + ".b", decoder[i].b);
    }
    return out;
}

std::vector<Tensor> LcnParams::tensors() const {
    std::vector<Tensor> out;
    for (auto& [name, t] : named_params()) out.push_back(t);
    return out;
}

LcnParams lcn_init(const LcnConfig& config, uint64_t seed) {
    config.validate();
    LcnParams p;
    p.config = config;
    Rng rng(derive_seed(seed, 0xe5c0de));
    auto make_layer = [&rng](int in, int out) {
        LinearLayer l;
        l.w = Tensor::uniform_he({in, out}, in, rng, true);
        l.b = Tensor::zeros({out}, true);
        return l;
    };
    for (size_t i = 0; i + 1 < config.pointnet_dims.size(); ++i)
        p.encoder.push_back(make_layer(config.pointnet_dims[i], config.pointnet_dims[i + 1]));
    const auto dec = config.resolved_decoder_dims();
    for (size_t i = 0; i + 1 < dec.size(); ++i) p.decoder.push_back(make_layer(dec[i], dec[i + 1]));
    return p;
}

long long lcn_param_count(const LcnConfig& config) {
    config.validate();
    long long n = 0;
    for (size_t i = 0; i + 1 < config.pointnet_dims.size(); ++i)
        n += static_cast<long long>(config.pointnet_dims[i]) * config.pointnet_dims[i + 1] +
             config.pointnet_dims[i + 1];
    const auto dec = config.resolved_decoder_dims();
    for (size_t i = 0; i + 1 < dec.size(); ++i)
        n += static_cast<long long>(dec[i]) * dec[i + 1] + dec[i + 1];
    return n;
}

Tensor lcn_forward(const LcnParams& params, const PointCloud& sparse) {
    if (sparse.empty()) throw EmptyInputError("lcn_forward: input cloud is empty");
    g_forward_calls.fetch_add(1, std::memory_order_relaxed);

    const int N = static_cast<int>(sparse.size());
    const int s = params.config.patch_side;
    const int patch = s * s;
    const double r = params.config.grid_extent;

    Tensor X = tensor_from_cloud(sparse, false);

    // PointNet: shared per-point MLP, then feature-wise max pool.
    Tensor h = X;
    for (const LinearLayer& l : params.encoder) h = relu(add_rowvec(matmul(h, l.w), l.b));
    Tensor g = maxpool_points(h);

    // Decoder rows: [global feature, landmark, 2D grid seed], one row per
    // emitted point, grid seeds cycling fastest.
    Tensor G = repeat_rows(reshape(g, {1, params.config.global_dim}), N * patch);
    Tensor L = repeat_rows(X, patch);
    std::vector<double> grid(static_cast<size_t>(N) * patch * 2);
    for (int i = 0; i < N; ++i)
        for (int gy = 0; gy < s; ++gy)
            for (int gx = 0; gx < s; ++gx) {
                const size_t row = (static_cast<size_t>(i) * patch + gy * s + gx) * 2;
                grid[row + 0] = s == 1 ? 0.0 : -r + 2.0 * r * gx / (s - 1);
                grid[row + 1] = s == 1 ? 0.0 : -r + 2.0 * r * gy / (s - 1);
            }
    Tensor seeds = Tensor::from_data({N * patch, 2}, std::move(grid), false);

    Tensor d = concat({G, L, seeds}, 1);
    for (size_t i = 0; i < params.decoder.size(); ++i) {
        d = add_rowvec(matmul(d, params.decoder[i].w), params.decoder[i].b);
        if (i + 1 < params.decoder.size()) d = relu(d);
    }
    return add(L, d);  // offsets anchored at the landmarks
}

PointCloud lcn_complete(const LcnParams& params, const PointCloud& sparse) {
    return cloud_from_tensor(lcn_forward(params, sparse));
}

long long lcn_forward_calls() { return g_forward_calls.load(std::memory_order_relaxed); }
void lcn_reset_forward_calls() { g_forward_calls.store(0, std::memory_order_relaxed); }

}  // namespace depthfill
