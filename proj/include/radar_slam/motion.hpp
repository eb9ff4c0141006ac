#pragma once

#include <Eigen/Core>

#include "radar_slam/state.hpp"

namespace radar_slam {

/// Commanded velocity and yaw rate.
struct ControlInput {
    double v = 0.0;    // m/s
    double psi = 0.0;  // rad/s
};

/// Noisy wheel-odometry reading of a control input.
struct OdometryReading {
    double v_bar = 0.0;
    double psi_bar = 0.0;
    Eigen::Matrix2d U = Eigen::Matrix2d::Zero();
};

/// Unicycle step with midpoint heading:
///   x += v*dt*cos(theta + dt*psi/2), y += v*dt*sin(...), theta += psi*dt.
Pose propagate_pose(const Pose& pose, const ControlInput& u, double dt);

/// d f / d x at (state, u): identity except the 3x3 pose block; landmarks are
/// static so their block is exactly I.
Eigen::MatrixXd jacobian_f_x(const AugmentedState& state, const ControlInput& u, double dt);

/// d f / d u at (state, u): (3+2N) x 2 with zero landmark rows.
Eigen::MatrixXd jacobian_f_u(const AugmentedState& state, const ControlInput& u, double dt);

/// EKF prediction. The pose is propagated with the odometry reading, landmark
/// means are untouched, and the covariance becomes
///   Fx P Fx^T + Fu U Fu^T + diag(Q, 0)
/// with the 3x3 process noise embedded in the pose block.
/// Throws NumericalStateError if the input covariance is not PSD.
AugmentedState predict(const AugmentedState& state, const OdometryReading& odo,
                       const Eigen::Matrix3d& Q, double dt);

}  // namespace radar_slam
