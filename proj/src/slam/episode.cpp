#include "mcslam/slam/episode.hpp"

#include <array>
#include <cmath>
#include <deque>
#include <memory>

namespace mcslam::slam {

namespace {

struct CellPath {
    std::vector<int> cells;   /* flattened col + row * width, start excluded */
    bool found = false;
};

CellPath shortest_free_path(const sim::FloorPlan& plan, int from, int to) {
    const int w = plan.width;
    std::vector<int> parent(std::size_t(w) * plan.height, -2);
    std::deque<int> queue{from};
    parent[std::size_t(from)] = -1;
    const int dc[4] = {1, -1, 0, 0};
    const int dr[4] = {0, 0, 1, -1};
    while (!queue.empty() && parent[std::size_t(to)] == -2) {
        const int cur = queue.front();
        queue.pop_front();
        const int c = cur % w, r = cur / w;
        for (int k = 0; k < 4; ++k) {
            const int nc = c + dc[k], nr = r + dr[k];
            if (!plan.in_bounds(nc, nr) || plan.wall(nc, nr)) continue;
            const int n = nc + nr * w;
            if (parent[std::size_t(n)] != -2) continue;
            parent[std::size_t(n)] = cur;
            queue.push_back(n);
        }
    }
    CellPath path;
    if (parent[std::size_t(to)] == -2) return path;
    path.found = true;
    for (int n = to; n != from; n = parent[std::size_t(n)]) path.cells.push_back(n);
    std::reverse(path.cells.begin(), path.cells.end());
    return path;
}

/* nearest free cell to the room's center, scanning the room rect */
int room_anchor(const sim::FloorPlan& plan, const sim::RoomRect& room) {
    const double mc = room.col + room.width / 2.0;
    const double mr = room.row + room.height / 2.0;
    int best = -1;
    double best_d = 0.0;
    for (int r = room.row; r < room.row + room.height; ++r)
        for (int c = room.col; c < room.col + room.width; ++c) {
            if (!plan.in_bounds(c, r) || plan.wall(c, r)) continue;
            const double d = (c + 0.5 - mc) * (c + 0.5 - mc) + (r + 0.5 - mr) * (r + 0.5 - mr);
            if (best < 0 || d < best_d) {
                best = c + r * plan.width;
                best_d = d;
            }
        }
    return best;
}

struct TourState {
    std::vector<std::array<double, 2>> waypoints;
    std::size_t next = 0;
};

/* Greedy nearest-room tour from the current cell; waypoints sit at the
   direction changes of the cell-to-cell shortest paths, so every leg is an
   axis-aligned run through free cell centers. */
void plan_tour(const sim::FloorPlan& plan, int start_cell, TourState& tour) {
    tour.waypoints.clear();
    tour.next = 0;

    std::vector<int> anchors;
    for (const auto& room : plan.rooms) {
        const int a = room_anchor(plan, room);
        if (a >= 0 && a != start_cell) anchors.push_back(a);
    }

    const int w = plan.width;
    const double res = plan.resolution;
    auto push_path = [&](int from, const CellPath& path) {
        int prev = from;
        for (std::size_t i = 0; i < path.cells.size(); ++i) {
            const int dir = path.cells[i] - prev;
            const bool last = i + 1 == path.cells.size();
            if (last || path.cells[i + 1] - path.cells[i] != dir) {
                const int c = path.cells[i] % w, r = path.cells[i] / w;
                tour.waypoints.push_back({(c + 0.5) * res, (r + 0.5) * res});
            }
            prev = path.cells[i];
        }
    };

    int cur = start_cell;
    while (!anchors.empty()) {
        CellPath best_path;
        std::size_t best_k = 0;
        for (std::size_t k = 0; k < anchors.size(); ++k) {
            CellPath p = shortest_free_path(plan, cur, anchors[k]);
            if (p.found && (!best_path.found || p.cells.size() < best_path.cells.size())) {
                best_path = std::move(p);
                best_k = k;
            }
        }
        if (!best_path.found) break;   /* unreachable rooms are left out */
        push_path(cur, best_path);
        cur = anchors[best_k];
        anchors.erase(anchors.begin() + std::ptrdiff_t(best_k));
    }
}

}  // namespace

DrivePolicy random_walk_policy(double v, double dt) {
    return [v, dt](const sim::FloorPlan& plan, const sim::RobotState& state, Rng& rng) {
        double ahead = sim::cast_single_ray(plan, state.pose.x, state.pose.y, state.pose.theta,
                                            4.0 * v * dt);
        sim::Control c;
        c.dt = dt;
        if (ahead < 2.0 * v * dt) {
            c.v = 0.0;
            c.omega = (rng.bernoulli(0.5) ? 1.0 : -1.0) * (0.8 + rng.uniform(0.0, 0.8)) / dt;
        } else {
            c.v = v;
            c.omega = rng.gaussian(0.25) / dt;
        }
        return c;
    };
}

DrivePolicy tour_policy(double v, double dt) {
    auto tour = std::make_shared<TourState>();
    return [v, dt, tour](const sim::FloorPlan& plan, const sim::RobotState& state, Rng&) {
        const int cell = int(state.pose.x / plan.resolution) +
                         int(state.pose.y / plan.resolution) * plan.width;
        auto skip_reached = [&] {
            while (tour->next < tour->waypoints.size()) {
                const auto& wp = tour->waypoints[tour->next];
                if (std::hypot(wp[0] - state.pose.x, wp[1] - state.pose.y) > 0.02) break;
                ++tour->next;
            }
        };
        skip_reached();
        if (tour->next >= tour->waypoints.size()) {
            plan_tour(plan, cell, *tour);
            skip_reached();
        }

        sim::Control c;
        c.dt = dt;
        if (tour->next >= tour->waypoints.size()) return c;   /* nowhere to go */

        const auto& wp = tour->waypoints[tour->next];
        const double dx = wp[0] - state.pose.x;
        const double dy = wp[1] - state.pose.y;
        const double dist = std::hypot(dx, dy);
        double err = std::atan2(dy, dx) - state.pose.theta;
        while (err > 3.14159265358979323846) err -= 2.0 * 3.14159265358979323846;
        while (err < -3.14159265358979323846) err += 2.0 * 3.14159265358979323846;
        if (std::fabs(err) > 0.02) {
            c.omega = std::clamp(err / dt, -1.2, 1.2);
        } else {
            c.v = std::min(v, dist / dt);
            c.omega = 0.0;
        }
        return c;
    };
}

EpisodeResult run_episode(const sim::FloorPlan& plan, const grid::Pose2D& start,
                          const EpisodeConfig& cfg, const DrivePolicy& policy,
                          std::ostream* log,
                          const std::function<void(const ParticleSet&)>& snapshot) {
    EpisodeResult result;
    Rng sim_rng(cfg.sim_seed);
    sim::RobotState state{start};
    result.true_poses.push_back(start);
    result.particles = init_particles(cfg.filter, start);

    sim::Scan scan0 = sim::raycast(plan, state, cfg.scan, sim_rng);
    for (auto& p : result.particles.particles)
        integrate_scan(p.map, start, scan0, cfg.filter.sensor);
    if (snapshot) snapshot(result.particles);

    for (int t = 0; t < cfg.steps; ++t) {
        sim::Control control = policy(plan, state, sim_rng);
        sim::StepResult moved = sim::step(plan, state, control, cfg.odom_noise, sim_rng);
        state = moved.state;
        result.true_poses.push_back(state.pose);

        sim::Scan scan = sim::raycast(plan, state, cfg.scan, sim_rng);
        double n_eff = slam_step(result.particles, moved.odometry, scan, cfg.filter);
        result.n_eff.push_back(n_eff);
        if (log) append_episode_record(*log, result.particles, moved.odometry, scan, n_eff);
        if (snapshot) snapshot(result.particles);
    }
    return result;
}

}  // namespace mcslam::slam
