#ifndef MCSLAM_GRID_OCCUPANCY_GRID_HPP
#define MCSLAM_GRID_OCCUPANCY_GRID_HPP

#include <cmath>
#include <cstddef>
#include <vector>

namespace mcslam::grid {

// Log-odds clamp. Keeps the logistic well away from floating-point
// saturation while still expressing near-certainty (p ~ 0.99995).
inline constexpr double kLogOddsMax = 10.0;

struct Pose2D {
    double x = 0.0;      // meters
    double y = 0.0;      // meters
    double theta = 0.0;  // radians

    bool operator==(const Pose2D&) const = default;
};

// Per-cell log-odds occupancy map. Cells are stored row-major, index
// (col, row) -> row * width + col. A value of exactly 0 marks a cell that
// has never been observed; any update moves it off 0.
class OccupancyGrid {
public:
    OccupancyGrid() = default;
    OccupancyGrid(int width, int height, double resolution, Pose2D origin = {});

    int width() const { return width_; }
    int height() const { return height_; }
    double resolution() const { return resolution_; }
    const Pose2D& origin() const { return origin_; }

    bool in_bounds(int col, int row) const {
        return col >= 0 && col < width_ && row >= 0 && row < height_;
    }

    std::size_t index(int col, int row) const {
        return static_cast<std::size_t>(row) * width_ + col;
    }

    double log_odds(int col, int row) const { return cells_[index(col, row)]; }

    // Adds a log-odds increment, clamped to [-kLogOddsMax, kLogOddsMax].
    void add_log_odds(int col, int row, double delta);

    const std::vector<double>& cells() const { return cells_; }
    std::vector<double>& cells() { return cells_; }

    // World <-> cell conversions. Origin is the world pose of the corner
    // of cell (0,0); axes are grid-aligned (origin.theta is carried as
    // metadata but maps are never stored rotated).
    int world_to_col(double wx) const;
    int world_to_row(double wy) const;

    bool operator==(const OccupancyGrid&) const = default;

private:
    int width_ = 0;
    int height_ = 0;
    double resolution_ = 0.05;
    Pose2D origin_;
    std::vector<double> cells_;
};

// Occupancy probability of one cell: logistic of its log-odds.
// Exactly 0.5 when the log-odds is 0. Throws std::out_of_range on a bad index.
double prob(const OccupancyGrid& grid, int col, int row);

inline double logistic(double log_odds) { return 1.0 / (1.0 + std::exp(-log_odds)); }

}  // namespace mcslam::grid

#endif  // MCSLAM_GRID_OCCUPANCY_GRID_HPP
