#pragma once

#include "mcslam/grid/occupancy_grid.hpp"
#include "mcslam/sim/lidar.hpp"

namespace mcslam::slam {

/* Per-beam mixture weights, spread, and map-update increments. */
struct SensorModel {
    double hit_sigma = 0.2;    /* meters */
    double z_hit = 0.9;
    double z_rand = 0.1;
    double max_range = 8.0;
    double l_occ = 0.85;
    double l_free = -0.4;
};

/* Fraction of a cell added to a beam's range before locating its endpoint
   cell, so a return from an obstacle surface that coincides with a cell
   boundary is classified into the obstacle-side cell for every approach
   direction. */
constexpr double kEndpointCellNudge = 1e-6;

/* Adds l_free along every beam's traversed cells and l_occ at the endpoint
   cell when the beam returned short of max_range. */
void integrate_scan(grid::OccupancyGrid& map, const grid::Pose2D& pose, const sim::Scan& scan,
                    const SensorModel& model);

}  // namespace mcslam::slam
