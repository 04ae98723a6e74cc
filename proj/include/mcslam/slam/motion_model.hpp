#pragma once

#include "mcslam/grid/occupancy_grid.hpp"
#include "mcslam/util/rng.hpp"

namespace mcslam::slam {

/* Variance mixing coefficients for the rotate-translate-rotate odometry
   model: a1 rot<-rot, a2 rot<-trans, a3 trans<-trans, a4 trans<-rot. */
struct MotionNoise {
    double a1 = 0.0;
    double a2 = 0.0;
    double a3 = 0.0;
    double a4 = 0.0;
};

/* Odometry increment already decomposed as rotate, translate, rotate. */
struct OdometryReading {
    double rot1 = 0.0;
    double trans = 0.0;
    double rot2 = 0.0;
};

double wrap_angle(double a);   /* into (-pi, pi] */

/* Splits the displacement from `a` to `b` into an odometry triple. */
OdometryReading decompose_motion(const grid::Pose2D& a, const grid::Pose2D& b);

/* Applies a (rot1, trans, rot2) triple to a pose. */
grid::Pose2D compose_motion(const grid::Pose2D& pose, const OdometryReading& u);

/* Samples a successor pose: each odometry component is perturbed with a
   zero-mean Gaussian whose variance mixes the squared components by the
   alpha coefficients, then composed onto `pose`. */
grid::Pose2D sample_motion(const grid::Pose2D& pose, const OdometryReading& u, const MotionNoise& noise,
                     Rng& rng);

}  // namespace mcslam::slam
