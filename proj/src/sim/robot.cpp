#include "mcslam/sim/robot.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

namespace mcslam::sim {

namespace {

bool free_at(const FloorPlan& plan, double x, double y) {
    int col = int(std::floor(x / plan.resolution));
    int row = int(std::floor(y / plan.resolution));
    return plan.in_bounds(col, row) && !plan.wall(col, row);
}

}  // namespace

StepResult step(const FloorPlan& plan, const RobotState& state, const Control& control,
                const slam::MotionNoise& noise, Rng& rng) {
    if (control.dt <= 0.0) throw std::invalid_argument("step dt must be positive");
    if (!free_at(plan, state.pose.x, state.pose.y))
        throw std::invalid_argument("robot pose inside a wall");

    const grid::Pose2D& p = state.pose;
    grid::Pose2D next = p;
    double arc = control.v * control.dt;
    double spin = control.omega * control.dt;

    if (std::fabs(control.omega) < 1e-12) {
        double free_dist = cast_single_ray(plan, p.x, p.y, p.theta, std::fabs(arc) + 1.0);
        /* back off a hair so the stopped pose stays in the free cell */
        double d = arc >= 0.0 ? std::min(arc, std::max(0.0, free_dist - 1e-9)) : arc;
        if (arc < 0.0) {
            double back = cast_single_ray(plan, p.x, p.y, p.theta + 3.14159265358979323846,
                                          std::fabs(arc) + 1.0);
            d = -std::min(-arc, std::max(0.0, back - 1e-9));
        }
        next.x = p.x + d * std::cos(p.theta);
        next.y = p.y + d * std::sin(p.theta);
    } else {
        /* integrate the arc in sub-cell steps, stop before entering a wall */
        int n = std::max(1, int(std::ceil(std::fabs(arc) / (plan.resolution / 8.0))));
        n = std::max(n, int(std::ceil(std::fabs(spin) / 0.05)));
        double x = p.x, y = p.y, th = p.theta;
        bool hit = false;
        for (int k = 0; k < n && !hit; ++k) {
            double nx = x + (arc / n) * std::cos(th);
            double ny = y + (arc / n) * std::sin(th);
            if (!free_at(plan, nx, ny)) {
                hit = true;
            } else {
                x = nx;
                y = ny;
                th += spin / n;
            }
        }
        next = grid::Pose2D{x, y, slam::wrap_angle(th)};
    }

    slam::OdometryReading truth = slam::decompose_motion(p, next);
    double r1s = truth.rot1 * truth.rot1, r2s = truth.rot2 * truth.rot2,
           ts = truth.trans * truth.trans;
    slam::OdometryReading noisy;
    noisy.rot1 = truth.rot1 + rng.gaussian(std::sqrt(noise.a1 * r1s + noise.a2 * ts));
    noisy.trans = truth.trans + rng.gaussian(std::sqrt(noise.a3 * ts + noise.a4 * (r1s + r2s)));
    noisy.rot2 = truth.rot2 + rng.gaussian(std::sqrt(noise.a1 * r2s + noise.a2 * ts));
    return StepResult{RobotState{next}, noisy};
}

}  // namespace mcslam::sim
