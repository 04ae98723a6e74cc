#include "mcslam/slam/motion_model.hpp"

#include <cmath>

namespace mcslam::slam {

double wrap_angle(double a) {
    const double two_pi = 6.283185307179586476925286766559;
    a = std::fmod(a, two_pi);
    if (a > two_pi / 2.0) a -= two_pi;
    if (a <= -two_pi / 2.0) a += two_pi;
    return a;
}

OdometryReading decompose_motion(const grid::Pose2D& a, const grid::Pose2D& b) {
    OdometryReading u;
    double dx = b.x - a.x, dy = b.y - a.y;
    u.trans = std::sqrt(dx * dx + dy * dy);
    /* below ~1e-9 m the bearing of the displacement is numeric noise */
    u.rot1 = u.trans > 1e-9 ? wrap_angle(std::atan2(dy, dx) - a.theta) : 0.0;
    u.rot2 = wrap_angle(b.theta - a.theta - u.rot1);
    return u;
}

grid::Pose2D compose_motion(const grid::Pose2D& pose, const OdometryReading& u) {
    double heading = pose.theta + u.rot1;
    return grid::Pose2D{pose.x + u.trans * std::cos(heading), pose.y + u.trans * std::sin(heading),
                  wrap_angle(pose.theta + u.rot1 + u.rot2)};
}

grid::Pose2D sample_motion(const grid::Pose2D& pose, const OdometryReading& u, const MotionNoise& noise,
                     Rng& rng) {
    double r1s = u.rot1 * u.rot1, r2s = u.rot2 * u.rot2, ts = u.trans * u.trans;
    OdometryReading hat;
    hat.rot1 = u.rot1 + rng.gaussian(std::sqrt(noise.a1 * r1s + noise.a2 * ts));
    hat.trans = u.trans + rng.gaussian(std::sqrt(noise.a3 * ts + noise.a4 * (r1s + r2s)));
    hat.rot2 = u.rot2 + rng.gaussian(std::sqrt(noise.a1 * r2s + noise.a2 * ts));
    return compose_motion(pose, hat);
}

}  // namespace mcslam::slam
