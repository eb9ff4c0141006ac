#include "radar_slam/motion.hpp"

#include <cmath>
#include <string>

#include "radar_slam/angles.hpp"
#include "radar_slam/errors.hpp"

namespace radar_slam {

Pose propagate_pose(const Pose& pose, const ControlInput& u, double dt) {
    const double mid = pose.theta + dt * u.psi / 2.0;
    Pose out;
    out.x = pose.x + u.v * dt * std::cos(mid);
    out.y = pose.y + u.v * dt * std::sin(mid);
    out.theta = wrap_angle(pose.theta + u.psi * dt);
    return out;
}

Eigen::MatrixXd jacobian_f_x(const AugmentedState& state, const ControlInput& u, double dt) {
    const double mid = state.pose().theta + dt * u.psi / 2.0;
    const double a = std::sin(mid);
    const double b = std::cos(mid);

    Eigen::MatrixXd fx = Eigen::MatrixXd::Identity(state.dim(), state.dim());
    fx(0, 2) = -dt * u.v * a;
    fx(1, 2) = dt * u.v * b;
    return fx;
}

Eigen::MatrixXd jacobian_f_u(const AugmentedState& state, const ControlInput& u, double dt) {
    const double mid = state.pose().theta + dt * u.psi / 2.0;
    const double a = std::sin(mid);
    const double b = std::cos(mid);

    Eigen::MatrixXd fu = Eigen::MatrixXd::Zero(state.dim(), 2);
    fu(0, 0) = dt * b;
    fu(0, 1) = -dt * dt / 2.0 * u.v * a;
    fu(1, 0) = dt * a;
    fu(1, 1) = dt * dt / 2.0 * u.v * b;
    fu(2, 1) = dt;
    return fu;
}

AugmentedState predict(const AugmentedState& state, const OdometryReading& odo,
                       const Eigen::Matrix3d& Q, double dt) {
    const double min_eig = state.min_covariance_eigenvalue();
    if (min_eig < -1e-9) {
        throw NumericalStateError("prediction input covariance is not PSD (min eigenvalue " +
                                  std::to_string(min_eig) + ")");
    }

    const ControlInput u{odo.v_bar, odo.psi_bar};
    const Eigen::MatrixXd fx = jacobian_f_x(state, u, dt);
    const Eigen::MatrixXd fu = jacobian_f_u(state, u, dt);

    Eigen::MatrixXd P = fx * state.covariance() * fx.transpose() + fu * odo.U * fu.transpose();
    P.topLeftCorner<3, 3>() += Q;

    AugmentedState out = state;
    out.set_pose(propagate_pose(state.pose(), u, dt));
    out.set_covariance(P);
    return out;
}

}  // namespace radar_slam
