#pragma once

#include <cstdint>
#include <iosfwd>
#include <vector>

#include "mcslam/grid/occupancy_grid.hpp"
#include "mcslam/sim/lidar.hpp"
#include "mcslam/slam/likelihood_field.hpp"
#include "mcslam/slam/mapper.hpp"
#include "mcslam/slam/motion_model.hpp"
#include "mcslam/util/rng.hpp"

namespace mcslam::slam {

struct Particle {
    std::vector<grid::Pose2D> trajectory;
    double weight = 0.0;
    grid::OccupancyGrid map;
};

struct ParticleSet {
    std::vector<Particle> particles;
    int t = 0;
};

struct FilterConfig {
    int particle_count = 30;
    MotionNoise noise{0.05, 0.01, 0.05, 0.01};
    SensorModel sensor;
    std::uint64_t seed = 0;
    int map_width = 64;
    int map_height = 64;
    double resolution = 0.1;
    grid::Pose2D map_origin;
};

/* All particles start at `start` with weight 1/N and empty maps. */
ParticleSet init_particles(const FilterConfig& cfg, const grid::Pose2D& start);

/* Propose from the motion model, weight by the likelihood field of each
   particle's own map, integrate the scan at the new pose, normalize, and
   resample when N_eff drops below half the particle count. Each particle
   draws from its own stream seeded by (seed, particle index, t), so the
   result does not depend on scheduling. Returns the pre-resample N_eff. */
double slam_step(ParticleSet& ps, const OdometryReading& u, const sim::Scan& scan,
                 const FilterConfig& cfg);

/* Max-weight particle; ties go to the lowest index. */
const Particle& best_particle(const ParticleSet& ps);

/* Systematic resampling. Expects normalized weights; leaves them at 1/N. */
void resample(ParticleSet& ps, Rng& rng);

double effective_sample_size(const ParticleSet& ps);

/* One JSON object per line: t, odometry, scan ranges, best pose, N_eff. */
void append_episode_record(std::ostream& out, const ParticleSet& ps, const OdometryReading& u,
                           const sim::Scan& scan, double n_eff);

}  // namespace mcslam::slam
