#pragma once

#include "depthfill/geometry.hpp"
#include "depthfill/tensor.hpp"

namespace depthfill {

// Symmetric average closest-point distance between two clouds, with the
// unsquared Euclidean norm. value = term1 + term2 where
//   term1 = mean over P1 of the distance to its nearest neighbor in P2,
//   term2 = mean over P2 of the distance to its nearest neighbor in P1.
struct ChamferResult {
    double value = 0;
    double term1 = 0;
    double term2 = 0;
};

// Exhaustive O(|P1|·|P2|) reference.
ChamferResult chamfer_bruteforce(const PointCloud& p1, const PointCloud& p2);

// Spatial-hash grid with expanding ring search; exact, value-identical to
// the brute force for any cell_size > 0. cell_size <= 0 picks a default
// from a median nearest-neighbor spacing estimate.
ChamferResult chamfer_fast(const PointCloud& p1, const PointCloud& p2, double cell_size = 0.0);

// Differentiable Chamfer loss: p1 is an N×3 tensor, p2 a fixed cloud.
// Correspondences are recomputed each forward pass; the backward pass
// distributes matched-pair unit-vector gradients through both terms.
// Ties match the lowest-index neighbor; coincident pairs contribute zero
// gradient.
Tensor chamfer_grad(const Tensor& p1, const PointCloud& p2);

PointCloud cloud_from_tensor(const Tensor& t);
Tensor tensor_from_cloud(const PointCloud& cloud, bool requires_grad = false);

}  // namespace depthfill
