#pragma once

#include <Eigen/Core>

#include "radar_slam/state.hpp"

namespace radar_slam {

/// One radar point detection in the sensor frame. The amplitude only matters
/// for picking cluster centers; R is the noise covariance attached by the
/// source (simulator or scenario).
struct RadarDetection {
    double r = 0.0;          // m, >= 0
    double phi = 0.0;        // rad, platform-relative, wrapped
    double amplitude = 0.0;  // unitless return strength
    Eigen::Matrix2d R = Eigen::Matrix2d::Zero();
};

struct RangeBearing {
    double r = 0.0;
    double phi = 0.0;
};

/// Predicted range/bearing of a landmark from a pose. Throws
/// DegenerateGeometryError when the landmark coincides with the platform.
RangeBearing measure(const Pose& pose, const Eigen::Vector2d& landmark);

/// Measurement Jacobian, 2 x (3+2N). Nonzero only in the pose columns and the
/// indexed landmark's two columns.
Eigen::MatrixXd jacobian_h(const AugmentedState& state, int landmark_index);

struct InnovationStats {
    Eigen::Matrix2d S;  // innovation covariance
    Eigen::MatrixXd W;  // Kalman gain, (3+2N) x 2
};

/// S = H P H^T + R and W = P H^T S^-1. Throws NumericalStateError when S is
/// not invertible to a usable condition number.
InnovationStats innovation_stats(const AugmentedState& state, int landmark_index,
                                 const Eigen::Matrix2d& R);

/// Negative log likelihood of the detection under the landmark's predicted
/// measurement: 0.5*e^T S^-1 e + 0.5*log((2 pi)^2 |S|), bearing innovation
/// wrapped. A singular S (possible only with zero measurement noise) yields
/// +infinity rather than an error, which is the correct gating limit.
double log_likelihood_distance(const RadarDetection& z, const AugmentedState& state,
                               int landmark_index);

}  // namespace radar_slam
