#pragma once

#include <vector>

#include "mcslam/grid/occupancy_grid.hpp"
#include "mcslam/sim/floorplan.hpp"
#include "mcslam/util/rng.hpp"

namespace mcslam::sim {

struct ScanConfig {
    int beam_count = 180;
    double fov = 6.283185307179586476925286766559;   /* 2*pi */
    double max_range = 8.0;
    double range_noise_sigma = 0.0;
};

struct Scan {
    std::vector<double> ranges;   /* meters, capped at max_range */
    double fov = 0.0;
    double max_range = 0.0;

    bool operator==(const Scan&) const = default;
};

/* Bearing of beam i relative to the sensor heading. */
inline double beam_bearing(const ScanConfig& cfg, int i) {
    return -cfg.fov / 2.0 + (i + 0.5) * cfg.fov / cfg.beam_count;
}
inline double beam_bearing(const Scan& scan, int i) {
    return -scan.fov / 2.0 + (i + 0.5) * scan.fov / double(scan.ranges.size());
}

struct RobotState {
    grid::Pose2D pose;
};

Scan raycast(const FloorPlan& plan, const RobotState& state, const ScanConfig& cfg, Rng& rng);

/* Distance from (x,y) along `heading` to the first wall cell of `plan`,
   capped at max_range. Integer grid traversal, so thin walls cannot be
   stepped over. */
double cast_single_ray(const FloorPlan& plan, double x, double y, double heading,
                       double max_range);

}  // namespace mcslam::sim
