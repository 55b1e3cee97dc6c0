#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "depthfill/geometry.hpp"
#include "depthfill/io.hpp"

namespace depthfill {

struct SceneConfig {
    int width = 96, height = 64;      // must be divisible by 16
    double z_min = 2.0, z_max = 20.0;  // meters
    int n_boxes = 6;                   // floating fronto-parallel boxes
    int scanline_period = 4;           // pixel rows between simulated scan lines
    double dropout = -1.0;             // per-point dropout; < 0 derives it from target_density
    double target_density = 0.04;      // fraction of pixels valid in sparse
};

struct SceneSample {
    Image3 rgb;         // 3×H×W in [0,1]
    DepthImage sparse;  // scan-line LiDAR-like samples of gt
    DepthImage gt;      // fully dense
    CameraIntrinsics K;
    uint64_t seed = 0;
};

// Deterministic procedural scene: ground plane + back plane + n_boxes
// occluders, nearest surface per pixel; shaded per-surface albedos so color
// edges align with depth edges; sparse depth from scan lines with dropout.
SceneSample generate_scene(const SceneConfig& config, uint64_t seed);

// Sample directory layout: rgb.ppm, sparse.pgm, gt.pgm, calib.txt.
void write_sample(const std::string& dir, const SceneSample& sample);
SceneSample read_sample(const std::string& dir);

}  // namespace depthfill
