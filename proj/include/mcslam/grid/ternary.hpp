#ifndef MCSLAM_GRID_TERNARY_HPP
#define MCSLAM_GRID_TERNARY_HPP

#include <cstddef>
#include <vector>

#include "mcslam/grid/occupancy_grid.hpp"

namespace mcslam::grid {

// Three-valued map image: 1.0 occupied, 0.5 unsearched, 0.0 free.
struct TernaryMap {
    int width = 0;
    int height = 0;
    double resolution = 0.05;
    Pose2D origin;
    std::vector<double> values;  // row-major, each exactly one of {0.0, 0.5, 1.0}

    TernaryMap() = default;
    TernaryMap(int w, int h, double res = 0.05, Pose2D org = {})
        : width(w), height(h), resolution(res), origin(org),
          values(static_cast<std::size_t>(w) * h, 0.5) {}

    std::size_t index(int col, int row) const {
        return static_cast<std::size_t>(row) * width + col;
    }
    double at(int col, int row) const { return values[index(col, row)]; }
    double& at(int col, int row) { return values[index(col, row)]; }

    bool operator==(const TernaryMap&) const = default;
};

// Binary image marking unsearched cells: 1.0 unsearched, 0.0 searched.
struct MaskImage {
    int width = 0;
    int height = 0;
    std::vector<double> values;

    MaskImage() = default;
    MaskImage(int w, int h)
        : width(w), height(h), values(static_cast<std::size_t>(w) * h, 0.0) {}

    std::size_t index(int col, int row) const {
        return static_cast<std::size_t>(row) * width + col;
    }

    bool operator==(const MaskImage&) const = default;
};

// Per cell: 1.0 if p > 0.5, 0.5 if p = 0.5 (log-odds exactly 0), 0.0 if p < 0.5.
TernaryMap to_ternary(const OccupancyGrid& grid);

// Per cell: 1.0 iff p = 0.5 (unsearched), else 0.0.
MaskImage to_mask(const OccupancyGrid& grid);

// Converts continuous network outputs back to a legal ternary map.
// Per cell: 0.5 if mask' >= 0.5; else 1.0 if image' >= 0.5; else 0.0.
// Throws std::invalid_argument on shape mismatch.
TernaryMap discretize_output(const std::vector<double>& image_cont,
                             const std::vector<double>& mask_cont,
                             int width, int height);

// True iff every value is exactly one of {0.0, 0.5, 1.0}.
bool is_legal_ternary(const TernaryMap& map);

}  // namespace mcslam::grid

#endif  // MCSLAM_GRID_TERNARY_HPP
