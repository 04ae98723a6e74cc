#pragma once

#include <cstdint>
#include <vector>

#include "mcslam/grid/occupancy_grid.hpp"
#include "mcslam/sim/lidar.hpp"
#include "mcslam/slam/mapper.hpp"

namespace mcslam::slam {

/* Distance-to-nearest-occupied-cell transform of a map, plus a searched
   flag per cell. Distances are center-to-center, in meters; infinity when
   the map has no occupied cell. */
struct LikelihoodField {
    int width = 0;
    int height = 0;
    double resolution = 0.0;
    grid::Pose2D origin;
    std::vector<double> dist;
    std::vector<std::uint8_t> searched;

    bool in_bounds(int col, int row) const {
        return col >= 0 && col < width && row >= 0 && row < height;
    }
    std::size_t index(int col, int row) const {
        return std::size_t(row) * width + col;
    }
};

LikelihoodField build_likelihood_field(const grid::OccupancyGrid& map);

/* Sum over beams of log(z_hit * N(d; 0, sigma) + z_rand / max_range) where d
   is the field distance at the beam endpoint. Endpoints that land out of
   bounds, on never-observed cells, or in a map without occupied cells
   contribute log(z_rand / max_range) alone. */
double measurement_likelihood(const sim::Scan& scan, const grid::Pose2D& pose,
                              const LikelihoodField& field, const SensorModel& model);

double measurement_likelihood(const sim::Scan& scan, const grid::Pose2D& pose,
                              const grid::OccupancyGrid& map, const SensorModel& model);

}  // namespace mcslam::slam
