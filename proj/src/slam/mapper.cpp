#include "mcslam/slam/mapper.hpp"

#include <cmath>
#include <stdexcept>

namespace mcslam::slam {

void integrate_scan(grid::OccupancyGrid& map, const grid::Pose2D& pose, const sim::Scan& scan,
                    const SensorModel& model) {
    const double res = map.resolution();
    int start_col = map.world_to_col(pose.x);
    int start_row = map.world_to_row(pose.y);
    if (!map.in_bounds(start_col, start_row))
        throw std::invalid_argument("scan pose outside map bounds");

    const double ox = map.origin().x, oy = map.origin().y;
    const double cx = (pose.x - ox) / res, cy = (pose.y - oy) / res;

    for (int i = 0; i < int(scan.ranges.size()); ++i) {
        double r = scan.ranges[std::size_t(i)];
        bool hit = r < scan.max_range;
        double angle = pose.theta + sim::beam_bearing(scan, i);
        double dx = std::cos(angle), dy = std::sin(angle);
        const double r_cls = r + kEndpointCellNudge * res;
        int end_col = map.world_to_col(pose.x + r_cls * dx);
        int end_row = map.world_to_row(pose.y + r_cls * dy);

        int col = start_col, row = start_row;
        const double inf = 1.0 / 0.0;
        int step_col = dx > 0 ? 1 : -1;
        int step_row = dy > 0 ? 1 : -1;
        double t_max_x = dx != 0.0 ? ((col + (dx > 0 ? 1 : 0)) - cx) / dx : inf;
        double t_max_y = dy != 0.0 ? ((row + (dy > 0 ? 1 : 0)) - cy) / dy : inf;
        const double t_delta_x = dx != 0.0 ? std::fabs(1.0 / dx) : inf;
        const double t_delta_y = dy != 0.0 ? std::fabs(1.0 / dy) : inf;
        const double t_cap = r_cls / res;

        while (!(col == end_col && row == end_row)) {
            if (map.in_bounds(col, row)) map.add_log_odds(col, row, model.l_free);
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
            if (t > t_cap + 1.0) break;   /* runaway guard; the endpoint cell is on the ray */
        }
        if (hit && col == end_col && row == end_row && map.in_bounds(col, row))
            map.add_log_odds(col, row, model.l_occ);
    }
}

}  // namespace mcslam::slam
