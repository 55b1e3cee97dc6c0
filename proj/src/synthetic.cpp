#include "depthfill/synthetic.hpp"

#include <algorithm>
#include <cmath>
#include <filesystem>

#include "depthfill/rng.hpp"

namespace depthfill {

namespace {

void validate(const SceneConfig& c) {
    if (c.width <= 0 || c.height <= 0 || c.width % 16 != 0 || c.height % 16 != 0)
        throw DimensionError("scene extents must be positive multiples of 16, got " +
                             std::to_string(c.width) + "x" + std::to_string(c.height));
    if (!(c.z_min > 0.0 && c.z_min < c.z_max))
        throw DimensionError("scene depth range requires 0 < z_min < z_max");
    if (c.scanline_period < 1) throw DimensionError("scanline_period must be >= 1");
    if (!(c.target_density > 0.0 && c.target_density <= 1.0))
        throw DimensionError("target_density must be in (0, 1]");
}

struct Box {
    double x0, x1, y0, y1, z;  // fronto-parallel rectangle at depth z
    double albedo[3];
};

}  // namespace

SceneSample generate_scene(const SceneConfig& config, uint64_t seed) {
    validate(config);
    const int W = config.width, H = config.height;

    SceneSample s;
    s.seed = seed;
    s.K.width = W;
    s.K.height = H;
    s.K.fx = s.K.fy = 0.9 * W;
    s.K.cx = (W - 1) / 2.0;
    s.K.cy = (H - 1) / 2.0;
    s.gt = DepthImage(W, H);
    s.sparse = DepthImage(W, H);
    s.rgb = Image3(W, H);

    Rng geom(derive_seed(seed, 1));
    Rng scan(derive_seed(seed, 2));

    // Bottom-row ground depth is cam_height / dir_y_max; keep it >= z_min.
    const double dir_y_max = (H - 1 - s.K.cy) / s.K.fy;
    const double cam_height =
        std::max(geom.uniform(1.2, 1.8), 1.05 * config.z_min * dir_y_max);
    const double z_back = 0.9 * config.z_max;

    std::vector<Box> boxes(config.n_boxes);
    for (Box& b : boxes) {
        const double z = geom.uniform(1.2 * config.z_min, 0.6 * config.z_max);
        const double uc = geom.uniform(0.1 * W, 0.9 * W);
        const double vc = geom.uniform(0.1 * H, 0.9 * H);
        const double xc = (uc - s.K.cx) / s.K.fx * z;
        const double yc = (vc - s.K.cy) / s.K.fy * z;
        const double wx = geom.uniform(0.3, 1.5);
        const double wy = geom.uniform(0.3, 1.5);
        b = {xc - wx, xc + wx, yc - wy, yc + wy, z, {}};
        for (double& a : b.albedo) a = geom.uniform(0.2, 1.0);
    }
    double ground_albedo[3], back_albedo[3];
    for (double& a : ground_albedo) a = geom.uniform(0.2, 0.8);
    for (double& a : back_albedo) a = geom.uniform(0.2, 0.8);

    for (int v = 0; v < H; ++v)
        for (int u = 0; u < W; ++u) {
            const double dir_x = (u - s.K.cx) / s.K.fx;
            const double dir_y = (v - s.K.cy) / s.K.fy;

            double depth = z_back;
            const double* albedo = back_albedo;
            if (dir_y > 0.0) {
                const double zg = cam_height / dir_y;
                if (zg < depth) {
                    depth = zg;
                    albedo = ground_albedo;
                }
            }
            for (const Box& b : boxes) {
                if (b.z >= depth) continue;
                const double hx = dir_x * b.z, hy = dir_y * b.z;
                if (hx >= b.x0 && hx <= b.x1 && hy >= b.y0 && hy <= b.y1) {
                    depth = b.z;
                    albedo = b.albedo;
                }
            }
            s.gt.at(u, v) = depth;
            const double shade =
                1.0 - 0.6 * (depth - config.z_min) / (config.z_max - config.z_min);
            for (int c = 0; c < 3; ++c) s.rgb.at(c, u, v) = albedo[c] * shade;
        }

    // Scan lines every scanline_period rows; per-point keep probability tuned
    // so the expected density hits target_density.
    double keep_prob;
    if (config.dropout >= 0.0) {
        keep_prob = 1.0 - config.dropout;
    } else {
        keep_prob = config.target_density * config.scanline_period;
        if (keep_prob > 1.0)
            throw DimensionError("target_density " + std::to_string(config.target_density) +
                                 " unreachable with scanline_period " +
                                 std::to_string(config.scanline_period));
    }
    const int phase = static_cast<int>(scan.next_below(config.scanline_period));
    for (int v = phase; v < H; v += config.scanline_period)
        for (int u = 0; u < W; ++u)
            if (scan.next_double() < keep_prob) s.sparse.at(u, v) = s.gt.at(u, v);

    return s;
}

void write_sample(const std::string& dir, const SceneSample& sample) {
    std::filesystem::create_directories(dir);
    write_rgb_ppm(dir + "/rgb.ppm", sample.rgb);
    write_depth_pgm(dir + "/sparse.pgm", sample.sparse);
    write_depth_pgm(dir + "/gt.pgm", sample.gt);
    write_calib(dir + "/calib.txt", sample.K);
}

SceneSample read_sample(const std::string& dir) {
    SceneSample s;
    s.rgb = read_rgb_ppm(dir + "/rgb.ppm");
    s.sparse = read_depth_pgm(dir + "/sparse.pgm");
    s.gt = read_depth_pgm(dir + "/gt.pgm");
    s.K = read_calib(dir + "/calib.txt");
    if (s.sparse.width != s.K.width || s.sparse.height != s.K.height ||
        s.gt.width != s.K.width || s.gt.height != s.K.height || s.rgb.width != s.K.width ||
        s.rgb.height != s.K.height)
        throw FormatError("inconsistent extents across sample files in " + dir);
    return s;
}

}  // namespace depthfill
