#include "mcslam/grid/occupancy_grid.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

namespace mcslam::grid {

OccupancyGrid::OccupancyGrid(int width, int height, double resolution, Pose2D origin)
    : width_(width), height_(height), resolution_(resolution), origin_(origin),
      cells_(static_cast<std::size_t>(width) * height, 0.0) {
    if (width <= 0 || height <= 0) {
        throw std::invalid_argument("OccupancyGrid: dimensions must be positive");
    }
    if (resolution <= 0.0) {
        throw std::invalid_argument("OccupancyGrid: resolution must be positive");
    }
}

void OccupancyGrid::add_log_odds(int col, int row, double delta) {
    double& cell = cells_[index(col, row)];
    cell = std::clamp(cell + delta, -kLogOddsMax, kLogOddsMax);
}

int OccupancyGrid::world_to_col(double wx) const {
    return static_cast<int>(std::floor((wx - origin_.x) / resolution_));
}

int OccupancyGrid::world_to_row(double wy) const {
    return static_cast<int>(std::floor((wy - origin_.y) / resolution_));
}

double prob(const OccupancyGrid& grid, int col, int row) {
    if (!grid.in_bounds(col, row)) {
        throw std::out_of_range("prob: cell index out of bounds");
    }
    return logistic(grid.log_odds(col, row));
}

}  // namespace mcslam::grid
