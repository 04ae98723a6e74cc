#pragma once

#include <cstdint>
#include <functional>
#include <iosfwd>
#include <vector>

#include "mcslam/sim/floorplan.hpp"
#include "mcslam/sim/lidar.hpp"
#include "mcslam/sim/robot.hpp"
#include "mcslam/slam/filter.hpp"

namespace mcslam::slam {

/* Chooses the next control from the simulator-side true state. */
using DrivePolicy = std::function<sim::Control(const sim::FloorPlan&, const sim::RobotState&,
                                               Rng&)>;

/* Wander with gentle heading jitter, spinning in place when a wall is close. */
DrivePolicy random_walk_policy(double v, double dt);

/* Patrol every room over shortest free-cell paths, replanning a fresh tour
   from the current position whenever the previous one is finished. Holds
   per-episode state: use a new instance for every episode. */
DrivePolicy tour_policy(double v, double dt);

struct EpisodeConfig {
    int steps = 200;
    sim::ScanConfig scan;
    MotionNoise odom_noise{0.01, 0.001, 0.01, 0.001};
    FilterConfig filter;
    std::uint64_t sim_seed = 1;
};

struct EpisodeResult {
    std::vector<grid::Pose2D> true_poses;   /* steps + 1 entries */
    ParticleSet particles;
    std::vector<double> n_eff;
};

/* Runs simulate -> slam_step for cfg.steps steps from `start`, integrating an
   initial scan into every particle map first. `log` gets one JSON line per
   step when set. `snapshot` is called after every slam_step. */
EpisodeResult run_episode(const sim::FloorPlan& plan, const grid::Pose2D& start,
                          const EpisodeConfig& cfg, const DrivePolicy& policy,
                          std::ostream* log = nullptr,
                          const std::function<void(const ParticleSet&)>& snapshot = {});

}  // namespace mcslam::slam
