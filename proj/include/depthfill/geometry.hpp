#pragma once

#include <cstdint>
#include <vector>

#include "depthfill/error.hpp"

namespace depthfill {

struct CameraIntrinsics {
    double fx = 0, fy = 0;  // focal lengths, pixels
    double cx = 0, cy = 0;  // principal point, pixels
    int width = 0, height = 0;

    void validate() const {
        if (fx <= 0 || fy <= 0 || width <= 0 || height <= 0)
            throw DimensionError("invalid intrinsics: fx, fy, width, height must be positive");
    }
};

// H×W depth grid in meters; 0 encodes a missing measurement.
struct DepthImage {
    int width = 0, height = 0;
    std::vector<double> values;  // row-major, height*width

    DepthImage() = default;
    DepthImage(int w, int h) : width(w), height(h), values(static_cast<size_t>(w) * h, 0.0) {}

    double& at(int u, int v) { return values[static_cast<size_t>(v) * width + u]; }
    double at(int u, int v) const { return values[static_cast<size_t>(v) * width + u]; }
    int valid_count() const {
        int n = 0;
        for (double d : values) n += d > 0.0 ? 1 : 0;
        return n;
    }
};

struct Point3 {
    double x = 0, y = 0, z = 0;
};

// Unordered points in the camera frame, meters, z forward.
struct PointCloud {
    std::vector<Point3> points;

    size_t size() const { return points.size(); }
    bool empty() const { return points.empty(); }
};

struct ProjectionResult {
    DepthImage depth;
    int dropped = 0;  // points with z <= 0, silently skipped
};

// Valid pixel (u,v,d) -> ((u-cx)d/fx, (v-cy)d/fy, d), row-major pixel order.
PointCloud unproject(const DepthImage& depth, const CameraIntrinsics& K);

// Nearest-z-wins splat of each z>0 point onto round(fx·x/z+cx), round(fy·y/z+cy).
// Rounding is half-up; out-of-bounds points are dropped.
ProjectionResult project_zbuffer(const PointCloud& cloud, const CameraIntrinsics& K);

// Keeps a uniformly random subset of round(valid_count · keep_ratio) valid
// pixels; deterministic per seed.
DepthImage subsample(const DepthImage& depth, double keep_ratio, uint64_t seed);

}  // namespace depthfill
