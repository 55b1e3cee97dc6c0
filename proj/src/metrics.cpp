#include "depthfill/metrics.hpp"

#include <cmath>
#include <cstdio>
#include <limits>

namespace depthfill {

std::string MetricsReport::to_text() const {
    char buf[256];
    std::snprintf(buf, sizeof buf,
                  "rmse=%.6f\nmae=%.6f\nirmse=%.6f\nimae=%.6f\nvalid_pixels=%lld\n", rmse, mae,
                  irmse, imae, valid_pixel_count);
    return buf;
}

std::string MetricsReport::to_csv_row() const {
    char buf[256];
    std::snprintf(buf, sizeof buf, "%.6f,%.6f,%.6f,%.6f,%lld", rmse, mae, irmse, imae,
                  valid_pixel_count);
    return buf;
}

std::string MetricsReport::csv_header() { return "rmse,mae,irmse,imae,valid_pixels"; }

void MetricAccumulator::add(const DepthImage& pred, const DepthImage& gt) {
    if (pred.width != gt.width || pred.height != gt.height)
        throw DimensionError("evaluate: prediction " + std::to_string(pred.width) + "x" +
                             std::to_string(pred.height) + " vs gt " + std::to_string(gt.width) +
                             "x" + std::to_string(gt.height));
    for (int v = 0; v < gt.height; ++v)
        for (int u = 0; u < gt.width; ++u) {
            const double g = gt.at(u, v);
            if (g <= 0.0) continue;
            const double p = pred.at(u, v);
            if (p <= 0.0)
                throw DomainError("inverse metrics undefined: prediction " + std::to_string(p) +
                                  " <= 0 at valid gt pixel (" + std::to_string(u) + ", " +
                                  std::to_string(v) + ")");
            const double e = p - g;
            const double ie = 1.0 / p - 1.0 / g;
            se_ += e * e;
            ae_ += std::abs(e);
            ise_ += ie * ie;
            iae_ += std::abs(ie);
            ++n_;
        }
}

MetricsReport MetricAccumulator::report() const {
    if (n_ == 0) throw DomainError("no valid gt pixels to evaluate");
    MetricsReport r;
    const double n = static_cast<double>(n_);
    r.rmse = 1000.0 * std::sqrt(se_ / n);
    r.mae = 1000.0 * (ae_ / n);
    r.irmse = 1000.0 * std::sqrt(ise_ / n);
    r.imae = 1000.0 * (iae_ / n);
    r.valid_pixel_count = n_;
    return r;
}

MetricsReport evaluate(const DepthImage& pred, const DepthImage& gt) {
    MetricAccumulator acc;
    acc.add(pred, gt);
    return acc.report();
}

DepthImage nn_fill_baseline(const DepthImage& sparse) {
    struct Valid {
        int u, v;
        size_t idx;
        double d;
    };
    std::vector<Valid> valid;
    for (int v = 0; v < sparse.height; ++v)
        for (int u = 0; u < sparse.width; ++u) {
            const double d = sparse.at(u, v);
            if (d > 0.0) valid.push_back({u, v, static_cast<size_t>(v) * sparse.width + u, d});
        }
    if (valid.empty()) throw DomainError("nn_fill_baseline: image has no valid pixels");

    DepthImage out = sparse;
    for (int v = 0; v < sparse.height; ++v)
        for (int u = 0; u < sparse.width; ++u) {
            if (sparse.at(u, v) > 0.0) continue;
            long long best = std::numeric_limits<long long>::max();
            size_t best_idx = 0;
            double best_d = 0;
            for (const Valid& q : valid) {
                const long long du = q.u - u, dv = q.v - v;
                const long long d2 = du * du + dv * dv;
                if (d2 < best || (d2 == best && q.idx < best_idx)) {
                    best = d2;
                    best_idx = q.idx;
                    best_d = q.d;
                }
            }
            out.at(u, v) = best_d;
        }
    return out;
}

}  // namespace depthfill
