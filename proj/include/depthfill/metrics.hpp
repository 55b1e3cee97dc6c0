#pragma once

#include <string>

#include "depthfill/geometry.hpp"

namespace depthfill {

// The four KITTI depth-completion metrics. RMSE/MAE in millimeters,
// iRMSE/iMAE on inverse depth in 1/km; depths are meters internally and
// convert to report units only here.
struct MetricsReport {
    double rmse = 0;   // mm
    double mae = 0;    // mm
    double irmse = 0;  // 1/km
    double imae = 0;   // 1/km
    long long valid_pixel_count = 0;

    std::string to_text() const;  // one metric=value per line
    std::string to_csv_row() const;
    static std::string csv_header();  // rmse,mae,irmse,imae,valid_pixels
};

// Pools squared/absolute errors over any number of prediction/gt pairs so
// dataset-level metrics use one pixel population.
class MetricAccumulator {
public:
    void add(const DepthImage& pred, const DepthImage& gt);
    MetricsReport report() const;

private:
    double se_ = 0, ae_ = 0, ise_ = 0, iae_ = 0;
    long long n_ = 0;
};

// Metrics over pixels where gt > 0. pred must be strictly positive on every
// such pixel or the inverse metrics are undefined (DomainError naming the
// pixel).
MetricsReport evaluate(const DepthImage& pred, const DepthImage& gt);

// Non-learning comparator: every missing pixel takes the depth of its
// nearest valid pixel (Euclidean pixel distance, lowest linear index on
// ties).
DepthImage nn_fill_baseline(const DepthImage& sparse);

}  // namespace depthfill
