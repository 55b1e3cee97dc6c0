#pragma once

#include <cstdint>
#include <string>
#include <utility>
#include <vector>

#include "depthfill/geometry.hpp"
#include "depthfill/tensor.hpp"

namespace depthfill {

// Coarse 3D densifier: every input point is a landmark that emits a
// patch_side² patch of new points. A PointNet (shared per-point MLP +
// max pool) produces a global feature; a shared decoder MLP maps
// [global, landmark, grid seed] to an offset added to the landmark.
struct LcnConfig {
    std::vector<int> pointnet_dims = {3, 64, 128, 256};  // per-point MLP widths
    int global_dim = 256;                                // last pointnet width
    std::vector<int> decoder_dims = {};  // defaults to {global_dim+5, 128, 64, 3}
    int patch_side = 2;                  // s; densification factor s²
    double grid_extent = 0.05;           // folding-grid half-width (dimensionless)

    std::vector<int> resolved_decoder_dims() const;
    void validate() const;

    static LcnConfig desk_default() { return {}; }
    // Plausible reconstruction at the scale the original network reports
    // (~0.2M parameters); not an exact layer map.
    static LcnConfig paper_preset() {
        LcnConfig c;
        c.pointnet_dims = {3, 128, 1024};
        c.global_dim = 1024;
        c.decoder_dims = {1029, 64, 32, 3};
        return c;
    }
};

struct LinearLayer {
    Tensor w;  // in×out
    Tensor b;  // out
};

struct LcnParams {
    LcnConfig config;
    std::vector<LinearLayer> encoder;
    std::vector<LinearLayer> decoder;

    // Stable name/tensor listing used by the optimizer and checkpoints.
    std::vector<std::pair<std::string, Tensor>> named_params() const;
    std::vector<Tensor> tensors() const;
};

LcnParams lcn_init(const LcnConfig& config, uint64_t seed);
long long lcn_param_count(const LcnConfig& config);

// Densifies an N-point cloud to exactly N·s² points (differentiable path).
Tensor lcn_forward(const LcnParams& params, const PointCloud& sparse);
PointCloud lcn_complete(const LcnParams& params, const PointCloud& sparse);

// Forward-invocation counter (ablation model1 must never trigger it).
long long lcn_forward_calls();
void lcn_reset_forward_calls();

}  // namespace depthfill
