#include "mcslam/slam/filter.hpp"

#include <algorithm>
#include <cmath>
#include <ostream>
#include <stdexcept>

#include "json.hpp"

namespace mcslam::slam {

ParticleSet init_particles(const FilterConfig& cfg, const grid::Pose2D& start) {
    if (cfg.particle_count < 1) throw std::invalid_argument("particle_count must be >= 1");
    ParticleSet ps;
    ps.t = 0;
    ps.particles.resize(std::size_t(cfg.particle_count));
    for (auto& p : ps.particles) {
        p.trajectory = {start};
        p.weight = 1.0 / cfg.particle_count;
        p.map = grid::OccupancyGrid(cfg.map_width, cfg.map_height, cfg.resolution,
                                    cfg.map_origin);
    }
    return ps;
}

double slam_step(ParticleSet& ps, const OdometryReading& u, const sim::Scan& scan,
                 const FilterConfig& cfg) {
    const int n = int(ps.particles.size());
    const int t_new = ps.t + 1;
    std::vector<double> log_w(static_cast<std::size_t>(n));

    for (int i = 0; i < n; ++i) {
        Particle& p = ps.particles[std::size_t(i)];
        Rng rng(mix_seed(cfg.seed, std::uint64_t(i), std::uint64_t(t_new)));
        grid::Pose2D pose = sample_motion(p.trajectory.back(), u, cfg.noise, rng);
        p.trajectory.push_back(pose);
        LikelihoodField field = build_likelihood_field(p.map);
        log_w[std::size_t(i)] = measurement_likelihood(scan, pose, field, cfg.sensor);
        integrate_scan(p.map, pose, scan, cfg.sensor);
    }

    /* common shift keeps exp() in range; weights are scale-invariant */
    double shift = *std::max_element(log_w.begin(), log_w.end());
    double sum = 0.0;
    for (int i = 0; i < n; ++i) {
        Particle& p = ps.particles[std::size_t(i)];
        p.weight *= std::isfinite(shift) ? std::exp(log_w[std::size_t(i)] - shift) : 0.0;
        sum += p.weight;
    }
    if (!(sum > 0.0) || !std::isfinite(sum)) throw std::runtime_error("filter divergence");
    for (auto& p : ps.particles) p.weight /= sum;

    double n_eff = effective_sample_size(ps);
    if (n_eff < n / 2.0) {
        Rng rng(mix_seed(cfg.seed, 0x7e5a3b9cd1f02468ull, std::uint64_t(t_new)));
        resample(ps, rng);
    }
    ps.t = t_new;
    return n_eff;
}

const Particle& best_particle(const ParticleSet& ps) {
    if (ps.particles.empty()) throw std::invalid_argument("empty particle set");
    std::size_t best = 0;
    for (std::size_t i = 1; i < ps.particles.size(); ++i)
        if (ps.particles[i].weight > ps.particles[best].weight) best = i;
    return ps.particles[best];
}

void resample(ParticleSet& ps, Rng& rng) {
    const int n = int(ps.particles.size());
    std::vector<Particle> next;
    next.reserve(std::size_t(n));
    double u0 = rng.uniform() / n;
    double cum = ps.particles[0].weight;
    int j = 0;
    for (int k = 0; k < n; ++k) {
        double target = u0 + double(k) / n;
        while (cum < target && j < n - 1) {
            ++j;
            cum += ps.particles[std::size_t(j)].weight;
        }
        next.push_back(ps.particles[std::size_t(j)]);
        next.back().weight = 1.0 / n;
    }
    ps.particles = std::move(next);
}

double effective_sample_size(const ParticleSet& ps) {
    double sq = 0.0;
    for (const auto& p : ps.particles) sq += p.weight * p.weight;
    return 1.0 / sq;
}

void append_episode_record(std::ostream& out, const ParticleSet& ps, const OdometryReading& u,
                           const sim::Scan& scan, double n_eff) {
    const Particle& best = best_particle(ps);
    const grid::Pose2D& pose = best.trajectory.back();
    nlohmann::json rec{
        {"t", ps.t},
        {"odometry", {{"rot1", u.rot1}, {"trans", u.trans}, {"rot2", u.rot2}}},
        {"scan", scan.ranges},
        {"best_pose", {{"x", pose.x}, {"y", pose.y}, {"theta", pose.theta}}},
        {"n_eff", n_eff},
    };
    out << rec.dump() << "\n";
}

}  // namespace mcslam::slam
