#include "mcslam/grid/ternary.hpp"

#include <stdexcept>

namespace mcslam::grid {

TernaryMap to_ternary(const OccupancyGrid& grid) {
    TernaryMap out(grid.width(), grid.height(), grid.resolution(), grid.origin());
    const auto& cells = grid.cells();
    for (std::size_t i = 0; i < cells.size(); ++i) {
        // The unsearched branch is the exact-equality case p = 0.5, which is
        // log-odds == 0: the untouched-cell initialization.
        const double L = cells[i];
        if (L == 0.0) {
            out.values[i] = 0.5;
        } else if (L > 0.0) {
            out.values[i] = 1.0;
        } else {
            out.values[i] = 0.0;
        }
    }
    return out;
}

MaskImage to_mask(const OccupancyGrid& grid) {
    MaskImage out(grid.width(), grid.height());
    const auto& cells = grid.cells();
    for (std::size_t i = 0; i < cells.size(); ++i) {
        out.values[i] = (cells[i] == 0.0) ? 1.0 : 0.0;
    }
    return out;
}

TernaryMap discretize_output(const std::vector<double>& image_cont,
                             const std::vector<double>& mask_cont,
                             int width, int height) {
    const std::size_t n = static_cast<std::size_t>(width) * height;
    if (image_cont.size() != n || mask_cont.size() != n) {
        throw std::invalid_argument("discretize_output: shape mismatch");
    }
    TernaryMap out(width, height);
    for (std::size_t i = 0; i < n; ++i) {
        if (mask_cont[i] >= 0.5) {
            out.values[i] = 0.5;
        } else if (image_cont[i] >= 0.5) {
            out.values[i] = 1.0;
        } else {
            out.values[i] = 0.0;
        }
    }
    return out;
}

bool is_legal_ternary(const TernaryMap& map) {
    if (map.values.size() != static_cast<std::size_t>(map.width) * map.height) {
        return false;
    }
    for (double v : map.values) {
        if (v != 0.0 && v != 0.5 && v != 1.0) {
            return false;
        }
    }
    return true;
}

}  // namespace mcslam::grid
