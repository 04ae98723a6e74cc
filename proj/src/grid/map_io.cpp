#include "mcslam/grid/map_io.hpp"

#include <cctype>
#include <cstdio>
#include <fstream>
#include <sstream>
#include <stdexcept>
#include <string>
#include <vector>

namespace mcslam::grid {

namespace {

unsigned char encode_pixel(double v) {
    if (v == 0.0) return 0;
    if (v == 0.5) return 128;
    if (v == 1.0) return 255;
    throw std::runtime_error("save_ternary: illegal ternary value " + std::to_string(v));
}

std::string format_double(double v) {
    char buf[40];
    std::snprintf(buf, sizeof(buf), "%.17g", v);
    return buf;
}

// Reads one ASCII unsigned integer token, tracking the byte offset for
// error reporting.
long parse_header_int(const std::string& buf, std::size_t& pos, const char* what) {
    while (pos < buf.size() && std::isspace(static_cast<unsigned char>(buf[pos]))) {
        ++pos;
    }
    if (pos >= buf.size() || !std::isdigit(static_cast<unsigned char>(buf[pos]))) {
        throw std::runtime_error(std::string("load_ternary: expected ") + what +
                                 " at byte offset " + std::to_string(pos));
    }
    long value = 0;
    while (pos < buf.size() && std::isdigit(static_cast<unsigned char>(buf[pos]))) {
        value = value * 10 + (buf[pos] - '0');
        ++pos;
    }
    return value;
}

}  // namespace

std::string meta_path_for(const std::string& pgm_path) {
    return pgm_path + ".meta";
}

void save_ternary(const TernaryMap& map, const std::string& pgm_path) {
    std::ofstream out(pgm_path, std::ios::binary);
    if (!out) {
        throw std::runtime_error("save_ternary: cannot open " + pgm_path);
    }
    out << "P5\n" << map.width << " " << map.height << "\n255\n";
    std::vector<unsigned char> raster(map.values.size());
    for (std::size_t i = 0; i < map.values.size(); ++i) {
        raster[i] = encode_pixel(map.values[i]);
    }
    out.write(reinterpret_cast<const char*>(raster.data()),
              static_cast<std::streamsize>(raster.size()));
    if (!out) {
        throw std::runtime_error("save_ternary: write failed for " + pgm_path);
    }
    out.close();

    std::ofstream meta(meta_path_for(pgm_path));
    if (!meta) {
        throw std::runtime_error("save_ternary: cannot open " + meta_path_for(pgm_path));
    }
    meta << "resolution: " << format_double(map.resolution) << "\n"
         << "origin_x: " << format_double(map.origin.x) << "\n"
         << "origin_y: " << format_double(map.origin.y) << "\n"
         << "origin_theta: " << format_double(map.origin.theta) << "\n"
         << "occupied_thresh: 0.5\n"
         << "free_thresh: 0.5\n";
}

TernaryMap load_ternary(const std::string& pgm_path) {
    std::ifstream in(pgm_path, std::ios::binary);
    if (!in) {
        throw std::runtime_error("load_ternary: cannot open " + pgm_path);
    }
    std::ostringstream ss;
    ss << in.rdbuf();
    const std::string buf = ss.str();

    if (buf.size() < 2 || buf[0] != 'P' || buf[1] != '5') {
        throw std::runtime_error("load_ternary: not a P5 PGM (byte offset 0)");
    }
    std::size_t pos = 2;
    const long w = parse_header_int(buf, pos, "width");
    const long h = parse_header_int(buf, pos, "height");
    const long maxval = parse_header_int(buf, pos, "maxval");
    if (w <= 0 || h <= 0) {
        throw std::runtime_error("load_ternary: non-positive dimensions in header");
    }
    if (maxval != 255) {
        throw std::runtime_error("load_ternary: maxval must be 255, got " +
                                 std::to_string(maxval));
    }
    if (pos >= buf.size() || !std::isspace(static_cast<unsigned char>(buf[pos]))) {
        throw std::runtime_error("load_ternary: expected whitespace after maxval at byte offset " +
                                 std::to_string(pos));
    }
    ++pos;  // single whitespace separates header from raster

    const std::size_t expected = static_cast<std::size_t>(w) * static_cast<std::size_t>(h);
    if (buf.size() - pos < expected) {
        throw std::runtime_error("load_ternary: truncated raster, expected " +
                                 std::to_string(expected) + " bytes from byte offset " +
                                 std::to_string(pos));
    }

    TernaryMap map(static_cast<int>(w), static_cast<int>(h));
    for (std::size_t i = 0; i < expected; ++i) {
        const unsigned char px = static_cast<unsigned char>(buf[pos + i]);
        switch (px) {
            case 0: map.values[i] = 0.0; break;
            case 128: map.values[i] = 0.5; break;
            case 255: map.values[i] = 1.0; break;
            default:
                throw std::runtime_error("load_ternary: illegal ternary pixel " +
                                         std::to_string(static_cast<int>(px)) +
                                         " at byte offset " + std::to_string(pos + i));
        }
    }

    // The sidecar is optional on load; defaults stand in when it is absent.
    std::ifstream meta(meta_path_for(pgm_path));
    if (meta) {
        std::string key;
        while (meta >> key) {
            double value = 0.0;
            if (!(meta >> value)) {
                break;
            }
            if (key == "resolution:") map.resolution = value;
            else if (key == "origin_x:") map.origin.x = value;
            else if (key == "origin_y:") map.origin.y = value;
            else if (key == "origin_theta:") map.origin.theta = value;
        }
    }
    return map;
}

}  // namespace mcslam::grid
