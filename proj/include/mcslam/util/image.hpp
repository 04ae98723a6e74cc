#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "mcslam/grid/ternary.hpp"

namespace mcslam::util {

struct GrayImage {
    int width = 0;
    int height = 0;
    std::vector<std::uint8_t> pixels;   // row-major

    GrayImage() = default;
    GrayImage(int w, int h, std::uint8_t fill = 0)
        : width(w), height(h), pixels(std::size_t(w) * h, fill) {}
};

// Same codebook as the PGM map format: 0 free, 128 unsearched, 255 occupied.
GrayImage ternary_to_gray(const grid::TernaryMap& m);

// Tiles images left to right with a separator column between them; inputs
// must share a height.
GrayImage hstack(const std::vector<GrayImage>& tiles, int gap = 2,
                 std::uint8_t gap_value = 64);

void write_pgm_gray(const std::string& path, const GrayImage& img);

// 8-bit grayscale, one zlib-compressed IDAT.
void write_png_gray(const std::string& path, const GrayImage& img);

}  // namespace mcslam::util
