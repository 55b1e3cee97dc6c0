#pragma once

#include <string>
#include <vector>

#include "depthfill/geometry.hpp"

namespace depthfill {

// 3×H×W color planes, values in [0,1].
struct Image3 {
    int width = 0, height = 0;
    std::vector<double> data;  // channel-major

    Image3() = default;
    Image3(int w, int h) : width(w), height(h), data(3ULL * w * h, 0.0) {}

    double& at(int c, int u, int v) {
        return data[(static_cast<size_t>(c) * height + v) * width + u];
    }
    double at(int c, int u, int v) const {
        return data[(static_cast<size_t>(c) * height + v) * width + u];
    }
};

// Depth file: binary P5 graymap, maxval 65535, big-endian samples, one
// sample per pixel = depth in millimeters, 0 = missing. Depths above
// 65.535 m do not fit and are a write error.
void write_depth_pgm(const std::string& path, const DepthImage& depth);
DepthImage read_depth_pgm(const std::string& path);

// Color file: binary P6 pixmap, maxval 255.
void write_rgb_ppm(const std::string& path, const Image3& rgb);
Image3 read_rgb_ppm(const std::string& path);

// Calibration: UTF-8 text, one key=value per line,
// keys {fx, fy, cx, cy, width, height}.
void write_calib(const std::string& path, const CameraIntrinsics& K);
CameraIntrinsics read_calib(const std::string& path);

// Point cloud: UTF-8 text, one "x y z" triple per line, meters.
void write_cloud_xyz(const std::string& path, const PointCloud& cloud);
PointCloud read_cloud_xyz(const std::string& path);

void write_text_file(const std::string& path, const std::string& content);
std::string read_text_file(const std::string& path);

}  // namespace depthfill
