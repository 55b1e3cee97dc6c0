#include "depthfill/chamfer.hpp"

#include <algorithm>
#include <array>
#include <cmath>
#include <limits>
#include <unordered_map>

namespace depthfill {

namespace {

double dist_sq(const Point3& a, const Point3& b) {
    const double dx = a.x - b.x, dy = a.y - b.y, dz = a.z - b.z;
    return dx * dx + dy * dy + dz * dz;
}

struct CellKey {
    int x, y, z;
    bool operator==(const CellKey&) const = default;
};

struct CellHash {
    size_t operator()(const CellKey& k) const {
        return (static_cast<size_t>(k.x) * 73856093u) ^ (static_cast<size_t>(k.y) * 19349663u) ^
               (static_cast<size_t>(k.z) * 83492791u);
    }
};

// Exact nearest neighbor over a uniform grid. Query expands Chebyshev rings
// around the query cell; a cell at ring k holds points no closer than
// (k-1)*cell, so the search stops once that bound exceeds the best hit.
// Ties resolve to the lowest point index.
class NearestGrid {
public:
    NearestGrid(const PointCloud& cloud, double cell) : cloud_(cloud), cell_(cell) {
        min_ = {std::numeric_limits<int>::max(), std::numeric_limits<int>::max(),
                std::numeric_limits<int>::max()};
        max_ = {std::numeric_limits<int>::min(), std::numeric_limits<int>::min(),
                std::numeric_limits<int>::min()};
        for (size_t i = 0; i < cloud.points.size(); ++i) {
            const CellKey k = key_of(cloud.points[i]);
            cells_[k].push_back(static_cast<int>(i));
            min_ = {std::min(min_.x, k.x), std::min(min_.y, k.y), std::min(min_.z, k.z)};
            max_ = {std::max(max_.x, k.x), std::max(max_.y, k.y), std::max(max_.z, k.z)};
        }
    }

    // Returns (squared distance, index of nearest point).
    std::pair<double, int> query(const Point3& q) const {
        const CellKey c = key_of(q);
        const int ring_cap =
            std::max({std::max(c.x - min_.x, max_.x - c.x), std::max(c.y - min_.y, max_.y - c.y),
                      std::max(c.z - min_.z, max_.z - c.z), 0});
        double best_sq = std::numeric_limits<double>::infinity();
        int best_idx = -1;
        for (int k = 0;; ++k) {
            if (best_idx >= 0 && k >= 1) {
                const double bound = (static_cast<double>(k) - 1.0) * cell_;
                if (bound * bound > best_sq) break;
            }
            if (k > ring_cap && best_idx >= 0) break;
            scan_ring(c, k, q, best_sq, best_idx);
        }
        return {best_sq, best_idx};
    }

private:
    CellKey key_of(const Point3& p) const {
        return {static_cast<int>(std::floor(p.x / cell_)), static_cast<int>(std::floor(p.y / cell_)),
                static_cast<int>(std::floor(p.z / cell_))};
    }

    void visit_cell(const CellKey& k, const Point3& q, double& best_sq, int& best_idx) const {
        const auto it = cells_.find(k);
        if (it == cells_.end()) return;
        for (int idx : it->second) {
            const double d = dist_sq(q, cloud_.points[idx]);
            if (d < best_sq || (d == best_sq && idx < best_idx)) {
                best_sq = d;
                best_idx = idx;
            }
        }
    }

    void scan_ring(const CellKey& c, int k, const Point3& q, double& best_sq, int& best_idx) const {
        if (k == 0) {
            visit_cell(c, q, best_sq, best_idx);
            return;
        }
        for (int dx = -k; dx <= k; ++dx)
            for (int dy = -k; dy <= k; ++dy) {
                const bool face = std::abs(dx) == k || std::abs(dy) == k;
                const int step = face ? 1 : 2 * k;  // interior columns: only the two z faces
                for (int dz = -k; dz <= k; dz += step)
                    visit_cell({c.x + dx, c.y + dy, c.z + dz}, q, best_sq, best_idx);
            }
    }

    const PointCloud& cloud_;
    double cell_;
    CellKey min_, max_;
    std::unordered_map<CellKey, std::vector<int>, CellHash> cells_;
};

// Median nearest-neighbor spacing over a <=100 point sample. The value only
// steers grid granularity; exactness never depends on it.
double default_cell_size(const PointCloud& cloud) {
    const size_t n = cloud.points.size();
    const size_t stride = std::max<size_t>(1, n / 100);
    std::vector<Point3> sample;
    for (size_t i = 0; i < n && sample.size() < 100; i += stride) sample.push_back(cloud.points[i]);
    if (sample.size() < 2) return 1.0;
    std::vector<double> nn;
    nn.reserve(sample.size());
    for (size_t i = 0; i < sample.size(); ++i) {
        double best = std::numeric_limits<double>::infinity();
        for (size_t j = 0; j < sample.size(); ++j)
            if (i != j) best = std::min(best, dist_sq(sample[i], sample[j]));
        nn.push_back(std::sqrt(best));
    }
    std::nth_element(nn.begin(), nn.begin() + nn.size() / 2, nn.end());
    const double med = nn[nn.size() / 2];
    return med > 0.0 ? med : 1.0;
}

void require_non_empty(const PointCloud& p1, const PointCloud& p2) {
    if (p1.empty() || p2.empty())
        throw EmptyInputError("chamfer distance requires two non-empty clouds");
}

struct Matches {
    double term = 0;
    std::vector<int> nearest;      // per query point, matched index
    std::vector<double> distance;  // per query point, unsquared distance
};

Matches directed_matches(const PointCloud& from, const NearestGrid& grid) {
    Matches m;
    m.nearest.resize(from.size());
    m.distance.resize(from.size());
    double acc = 0.0;
    for (size_t i = 0; i < from.points.size(); ++i) {
        const auto [dsq, idx] = grid.query(from.points[i]);
        m.nearest[i] = idx;
        m.distance[i] = std::sqrt(dsq);
        acc += m.distance[i];
    }
    m.term = acc / static_cast<double>(from.size());
    return m;
}

}  // namespace

ChamferResult chamfer_bruteforce(const PointCloud& p1, const PointCloud& p2) {
    require_non_empty(p1, p2);
    ChamferResult r;
    double acc = 0.0;
    for (const Point3& x : p1.points) {
        double best = std::numeric_limits<double>::infinity();
        for (const Point3& y : p2.points) best = std::min(best, dist_sq(x, y));
        acc += std::sqrt(best);
    }
    r.term1 = acc / static_cast<double>(p1.size());
    acc = 0.0;
    for (const Point3& y : p2.points) {
        double best = std::numeric_limits<double>::infinity();
        for (const Point3& x : p1.points) best = std::min(best, dist_sq(x, y));
        acc += std::sqrt(best);
    }
    r.term2 = acc / static_cast<double>(p2.size());
    r.value = r.term1 + r.term2;
    return r;
}

ChamferResult chamfer_fast(const PointCloud& p1, const PointCloud& p2, double cell_size) {
    require_non_empty(p1, p2);
    const double h2 = cell_size > 0.0 ? cell_size : default_cell_size(p2);
    const double h1 = cell_size > 0.0 ? cell_size : default_cell_size(p1);
    NearestGrid g2(p2, h2), g1(p1, h1);
    ChamferResult r;
    r.term1 = directed_matches(p1, g2).term;
    r.term2 = directed_matches(p2, g1).term;
    r.value = r.term1 + r.term2;
    return r;
}

Tensor chamfer_grad(const Tensor& p1, const PointCloud& p2) {
    const auto& s = p1.shape();
    if (s.size() != 2 || s[1] != 3)
        throw DimensionError("chamfer_grad expects an N×3 tensor, got " + shape_str(s));
    PointCloud c1 = cloud_from_tensor(p1);
    require_non_empty(c1, p2);

    NearestGrid g2(p2, default_cell_size(p2));
    NearestGrid g1(c1, default_cell_size(c1));
    Matches fwd = directed_matches(c1, g2);   // P1 -> P2
    Matches rev = directed_matches(p2, g1);   // P2 -> P1
    const double value = fwd.term + rev.term;

    const size_t n1 = c1.size(), n2 = p2.size();
    auto pn = p1.node();
    auto p2_points = p2.points;  // copy keeps the closure self-contained
    return make_op_output(
        {1}, {value}, {p1},
        [pn, fwd = std::move(fwd), rev = std::move(rev), p2_points = std::move(p2_points), n1,
         n2](Tensor::Node& node) {
            if (!pn->requires_grad) return;
            const double g = node.grad[0];
            auto* gp = pn->grad.data();
            const auto* xp = pn->data.data();
            for (size_t i = 0; i < n1; ++i) {
                const double d = fwd.distance[i];
                if (d == 0.0) continue;  // coincident pair: zero contribution
                const Point3& y = p2_points[fwd.nearest[i]];
                const double scale = g / (d * static_cast<double>(n1));
                gp[3 * i + 0] += scale * (xp[3 * i + 0] - y.x);
                gp[3 * i + 1] += scale * (xp[3 * i + 1] - y.y);
                gp[3 * i + 2] += scale * (xp[3 * i + 2] - y.z);
            }
            for (size_t j = 0; j < n2; ++j) {
                const double d = rev.distance[j];
                if (d == 0.0) continue;
                const int i = rev.nearest[j];
                const Point3& y = p2_points[j];
                const double scale = g / (d * static_cast<double>(n2));
                gp[3 * i + 0] += scale * (xp[3 * i + 0] - y.x);
                gp[3 * i + 1] += scale * (xp[3 * i + 1] - y.y);
                gp[3 * i + 2] += scale * (xp[3 * i + 2] - y.z);
            }
        });
}

PointCloud cloud_from_tensor(const Tensor& t) {
    const auto& s = t.shape();
    if (s.size() != 2 || s[1] != 3)
        throw DimensionError("cloud_from_tensor expects N×3, got " + shape_str(s));
    PointCloud c;
    c.points.resize(s[0]);
    const auto& d = t.data();
    for (int i = 0; i < s[0]; ++i)
        c.points[i] = {d[3 * i], d[3 * i + 1], d[3 * i + 2]};
    return c;
}

Tensor tensor_from_cloud(const PointCloud& cloud, bool requires_grad) {
    if (cloud.empty()) throw EmptyInputError("tensor_from_cloud: empty cloud");
    std::vector<double> data;
    data.reserve(cloud.size() * 3);
    for (const Point3& p : cloud.points) {
        data.push_back(p.x);
        data.push_back(p.y);
        data.push_back(p.z);
    }
    return Tensor::from_data({static_cast<int>(cloud.size()), 3}, std::move(data), requires_grad);
}

}  // namespace depthfill
