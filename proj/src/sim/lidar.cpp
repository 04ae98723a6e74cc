#include "mcslam/sim/lidar.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <stdexcept>
#include <string>

namespace mcslam::sim {

double cast_single_ray(const FloorPlan& plan, double x, double y, double heading,
                       double max_range) {
    const double res = plan.resolution;
    double cx = x / res, cy = y / res;   /* cell-unit coordinates */
    int col = int(std::floor(cx)), row = int(std::floor(cy));
    const double dx = std::cos(heading), dy = std::sin(heading);

    const double inf = std::numeric_limits<double>::infinity();
    int step_col = dx > 0 ? 1 : -1;
    int step_row = dy > 0 ? 1 : -1;
    double t_max_x = dx != 0.0 ? ((col + (dx > 0 ? 1 : 0)) - cx) / dx : inf;
    double t_max_y = dy != 0.0 ? ((row + (dy > 0 ? 1 : 0)) - cy) / dy : inf;
    const double t_delta_x = dx != 0.0 ? std::fabs(1.0 / dx) : inf;
    const double t_delta_y = dy != 0.0 ? std::fabs(1.0 / dy) : inf;
    const double t_cap = max_range / res;

    while (true) {
        double t;
        if (t_max_x < t_max_y) {
            t = t_max_x;
            t_max_x += t_delta_x;
            col += step_col;
        } else {
            t = t_max_y;
            t_max_y += t_delta_y;
            row += step_row;
        }
        if (t >= t_cap) return max_range;
        if (!plan.in_bounds(col, row)) return max_range;
        if (plan.wall(col, row)) return t * res;
    }
}

Scan raycast(const FloorPlan& plan, const RobotState& state, const ScanConfig& cfg, Rng& rng) {
    if (cfg.beam_count < 1 || cfg.fov <= 0.0 || cfg.max_range <= 0.0)
        throw std::invalid_argument("scan config out of range");
    const double res = plan.resolution;
    int col = int(std::floor(state.pose.x / res));
    int row = int(std::floor(state.pose.y / res));
    if (!plan.in_bounds(col, row) || plan.wall(col, row))
        throw std::invalid_argument("sensor pose inside a wall at cell (" +
                                    std::to_string(col) + ", " + std::to_string(row) + ")");

    Scan scan;
    scan.fov = cfg.fov;
    scan.max_range = cfg.max_range;
    scan.ranges.resize(std::size_t(cfg.beam_count));
    for (int i = 0; i < cfg.beam_count; ++i) {
        double angle = state.pose.theta + beam_bearing(cfg, i);
        double r = cast_single_ray(plan, state.pose.x, state.pose.y, angle, cfg.max_range);
        if (cfg.range_noise_sigma > 0.0)
            r = std::clamp(r + rng.gaussian(cfg.range_noise_sigma), 0.0, cfg.max_range);
        scan.ranges[std::size_t(i)] = r;
    }
    return scan;
}

}  // namespace mcslam::sim
