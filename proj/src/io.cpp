#include "depthfill/io.hpp"

#include <algorithm>
#include <cctype>
#include <cmath>
#include <cstdint>
#include <fstream>
#include <sstream>

namespace depthfill {

namespace {

std::ofstream open_out(const std::string& path, bool binary) {
    std::ofstream f(path, binary ? std::ios::binary : std::ios::out);
    if (!f) throw IoError("cannot open for writing: " + path);
    return f;
}

std::ifstream open_in(const std::string& path, bool binary) {
    std::ifstream f(path, binary ? std::ios::binary : std::ios::in);
    if (!f) throw IoError("cannot open for reading: " + path);
    return f;
}

// Reads one whitespace-delimited netpbm header token, skipping # comments.
std::string pnm_token(std::istream& in, const std::string& path) {
    std::string tok;
    int c;
    while ((c = in.get()) != EOF) {
        if (c == '#') {
            while ((c = in.get()) != EOF && c != '\n') {
            }
            continue;
        }
        if (std::isspace(c)) {
            if (!tok.empty()) return tok;
            continue;
        }
        tok.push_back(static_cast<char>(c));
    }
    if (tok.empty()) throw FormatError("truncated header in " + path);
    return tok;
}

int pnm_int(std::istream& in, const std::string& path) {
    const std::string tok = pnm_token(in, path);
    try {
        size_t pos = 0;
        int v = std::stoi(tok, &pos);
        if (pos != tok.size() || v <= 0) throw std::invalid_argument(tok);
        return v;
    } catch (const std::exception&) {
        throw FormatError("bad header field '" + tok + "' in " + path);
    }
}

}  // namespace

void write_depth_pgm(const std::string& path, const DepthImage& depth) {
    auto f = open_out(path, true);
    f << "P5\n" << depth.width << " " << depth.height << "\n65535\n";
    std::vector<uint8_t> buf(depth.values.size() * 2);
    for (size_t i = 0; i < depth.values.size(); ++i) {
        const double d = depth.values[i];
        if (d < 0.0 || !std::isfinite(d))
            throw IoError("negative or non-finite depth writing " + path);
        const long long mm = std::llround(d * 1000.0);
        if (mm > 65535)
            throw IoError("depth " + std::to_string(d) + " m exceeds 16-bit mm range in " + path);
        buf[2 * i] = static_cast<uint8_t>(mm >> 8);
        buf[2 * i + 1] = static_cast<uint8_t>(mm & 0xff);
    }
    f.write(reinterpret_cast<const char*>(buf.data()), static_cast<std::streamsize>(buf.size()));
    if (!f) throw IoError("short write to " + path);
}

DepthImage read_depth_pgm(const std::string& path) {
    auto f = open_in(path, true);
    if (pnm_token(f, path) != "P5") throw FormatError("not a P5 graymap: " + path);
    const int w = pnm_int(f, path);
    const int h = pnm_int(f, path);
    const int maxval = pnm_int(f, path);
    if (maxval != 65535) throw FormatError("expected maxval 65535 in " + path);
    DepthImage depth(w, h);
    std::vector<uint8_t> buf(static_cast<size_t>(w) * h * 2);
    f.read(reinterpret_cast<char*>(buf.data()), static_cast<std::streamsize>(buf.size()));
    if (f.gcount() != static_cast<std::streamsize>(buf.size()))
        throw FormatError("payload length mismatch in " + path + ": expected " +
                          std::to_string(buf.size()) + " bytes, got " +
                          std::to_string(f.gcount()));
    for (size_t i = 0; i < depth.values.size(); ++i) {
        const uint16_t mm = static_cast<uint16_t>((buf[2 * i] << 8) | buf[2 * i + 1]);
        depth.values[i] = mm / 1000.0;
    }
    return depth;
}

void write_rgb_ppm(const std::string& path, const Image3& rgb) {
    auto f = open_out(path, true);
    f << "P6\n" << rgb.width << " " << rgb.height << "\n255\n";
    std::vector<uint8_t> buf(3ULL * rgb.width * rgb.height);
    size_t k = 0;
    for (int v = 0; v < rgb.height; ++v)
        for (int u = 0; u < rgb.width; ++u)
            for (int c = 0; c < 3; ++c) {
                const double x = std::clamp(rgb.at(c, u, v), 0.0, 1.0);
                buf[k++] = static_cast<uint8_t>(std::lround(x * 255.0));
            }
    f.write(reinterpret_cast<const char*>(buf.data()), static_cast<std::streamsize>(buf.size()));
    if (!f) throw IoError("short write to " + path);
}

Image3 read_rgb_ppm(const std::string& path) {
    auto f = open_in(path, true);
    if (pnm_token(f, path) != "P6") throw FormatError("not a P6 pixmap: " + path);
    const int w = pnm_int(f, path);
    const int h = pnm_int(f, path);
    const int maxval = pnm_int(f, path);
    if (maxval != 255) throw FormatError("expected maxval 255 in " + path);
    Image3 rgb(w, h);
    std::vector<uint8_t> buf(3ULL * w * h);
    f.read(reinterpret_cast<char*>(buf.data()), static_cast<std::streamsize>(buf.size()));
    if (f.gcount() != static_cast<std::streamsize>(buf.size()))
        throw FormatError("payload length mismatch in " + path);
    size_t k = 0;
    for (int v = 0; v < h; ++v)
        for (int u = 0; u < w; ++u)
            for (int c = 0; c < 3; ++c) rgb.at(c, u, v) = buf[k++] / 255.0;
    return rgb;
}

void write_calib(const std::string& path, const CameraIntrinsics& K) {
    std::ostringstream ss;
    ss.precision(17);
    ss << "fx=" << K.fx << "\nfy=" << K.fy << "\ncx=" << K.cx << "\ncy=" << K.cy
       << "\nwidth=" << K.width << "\nheight=" << K.height << "\n";
    write_text_file(path, ss.str());
}

CameraIntrinsics read_calib(const std::string& path) {
    auto f = open_in(path, false);
    CameraIntrinsics K;
    bool got[6] = {};
    std::string line;
    while (std::getline(f, line)) {
        if (line.empty()) continue;
        const auto eq = line.find('=');
        if (eq == std::string::npos) throw FormatError("malformed line '" + line + "' in " + path);
        const std::string key = line.substr(0, eq);
        const std::string val = line.substr(eq + 1);
        try {
            if (key == "fx") K.fx = std::stod(val), got[0] = true;
            else if (key == "fy") K.fy = std::stod(val), got[1] = true;
            else if (key == "cx") K.cx = std::stod(val), got[2] = true;
            else if (key == "cy") K.cy = std::stod(val), got[3] = true;
            else if (key == "width") K.width = std::stoi(val), got[4] = true;
            else if (key == "height") K.height = std::stoi(val), got[5] = true;
            else throw FormatError("unknown calibration key '" + key + "' in " + path);
        } catch (const FormatError&) {
            throw;
        } catch (const std::exception&) {
            throw FormatError("bad value for '" + key + "' in " + path);
        }
    }
    for (bool g : got)
        if (!g) throw FormatError("missing calibration key in " + path);
    K.validate();
    return K;
}

void write_cloud_xyz(const std::string& path, const PointCloud& cloud) {
    std::ostringstream ss;
    ss.precision(17);
    for (const Point3& p : cloud.points) ss << p.x << " " << p.y << " " << p.z << "\n";
    write_text_file(path, ss.str());
}

PointCloud read_cloud_xyz(const std::string& path) {
    auto f = open_in(path, false);
    PointCloud cloud;
    std::string line;
    size_t lineno = 0;
    while (std::getline(f, line)) {
        ++lineno;
        if (line.empty()) continue;
        std::istringstream ss(line);
        Point3 p;
        if (!(ss >> p.x >> p.y >> p.z))
            throw FormatError("malformed point at " + path + ":" + std::to_string(lineno));
        cloud.points.push_back(p);
    }
    return cloud;
}

void write_text_file(const std::string& path, const std::string& content) {
    auto f = open_out(path, true);
    f.write(content.data(), static_cast<std::streamsize>(content.size()));
    if (!f) throw IoError("short write to " + path);
}

std::string read_text_file(const std::string& path) {
    auto f = open_in(path, true);
    std::ostringstream ss;
    ss << f.rdbuf();
    return ss.str();
}

}  // namespace depthfill
