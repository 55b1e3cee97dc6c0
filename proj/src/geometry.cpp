#include "depthfill/geometry.hpp"

#include <cmath>

#include "depthfill/rng.hpp"

namespace depthfill {

PointCloud unproject(const DepthImage& depth, const CameraIntrinsics& K) {
    K.validate();
    if (depth.width != K.width || depth.height != K.height)
        throw DimensionError("unproject: depth extents " + std::to_string(depth.width) + "x" +
                             std::to_string(depth.height) + " do not match intrinsics " +
                             std::to_string(K.width) + "x" + std::to_string(K.height));
    PointCloud cloud;
    cloud.points.reserve(static_cast<size_t>(depth.valid_count()));
    for (int v = 0; v < depth.height; ++v)
        for (int u = 0; u < depth.width; ++u) {
            const double d = depth.at(u, v);
            if (d <= 0.0) continue;
            cloud.points.push_back({(u - K.cx) * d / K.fx, (v - K.cy) * d / K.fy, d});
        }
    return cloud;
}

ProjectionResult project_zbuffer(const PointCloud& cloud, const CameraIntrinsics& K) {
    K.validate();
    ProjectionResult res;
    res.depth = DepthImage(K.width, K.height);
    for (const Point3& p : cloud.points) {
        if (p.z <= 0.0) {
            ++res.dropped;
            continue;
        }
        const int u = static_cast<int>(std::floor(K.fx * p.x / p.z + K.cx + 0.5));
        const int v = static_cast<int>(std::floor(K.fy * p.y / p.z + K.cy + 0.5));
        if (u < 0 || u >= K.width || v < 0 || v >= K.height) continue;
        double& cell = res.depth.at(u, v);
        if (cell == 0.0 || p.z < cell) cell = p.z;
    }
    return res;
}

DepthImage subsample(const DepthImage& depth, double keep_ratio, uint64_t seed) {
    if (!(keep_ratio > 0.0 && keep_ratio <= 1.0))
        throw DimensionError("subsample: keep_ratio must be in (0, 1], got " +
                             std::to_string(keep_ratio));
    std::vector<size_t> valid;
    for (size_t i = 0; i < depth.values.size(); ++i)
        if (depth.values[i] > 0.0) valid.push_back(i);
    const size_t keep = static_cast<size_t>(
        std::llround(static_cast<double>(valid.size()) * keep_ratio));

    Rng rng(seed);
    rng.shuffle(valid);
    DepthImage out(depth.width, depth.height);
    for (size_t i = 0; i < keep; ++i) out.values[valid[i]] = depth.values[valid[i]];
    return out;
}

}  // namespace depthfill
