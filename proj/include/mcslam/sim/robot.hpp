#pragma once

#include "mcslam/sim/floorplan.hpp"
#include "mcslam/sim/lidar.hpp"
#include "mcslam/slam/motion_model.hpp"
#include "mcslam/util/rng.hpp"

namespace mcslam::sim {

struct Control {
    double v = 0.0;       /* m/s */
    double omega = 0.0;   /* rad/s */
    double dt = 0.0;      /* s */
};

struct StepResult {
    RobotState state;
    slam::OdometryReading odometry;
};

/* Advances the true state by noiseless unicycle kinematics, stopping at wall
   contact, and reports the displacement as an odometry triple corrupted with
   the same alpha-mixed Gaussian family the filter's motion model samples. */
StepResult step(const FloorPlan& plan, const RobotState& state, const Control& control,
                const slam::MotionNoise& noise, Rng& rng);

}  // namespace mcslam::sim
