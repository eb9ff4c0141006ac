#include "radar_slam/measurement.hpp"

#include <cmath>
#include <limits>
#include <string>

#include <Eigen/Eigenvalues>

#include "radar_slam/angles.hpp"
#include "radar_slam/errors.hpp"

namespace radar_slam {

namespace {
constexpr double kMinRange = 1e-9;
constexpr double kMaxConditionNumber = 1e12;
}  // namespace

RangeBearing measure(const Pose& pose, const Eigen::Vector2d& landmark) {
    const double dx = landmark.x() - pose.x;
    const double dy = landmark.y() - pose.y;
    const double r = std::hypot(dx, dy);
    if (r <= kMinRange) {
        throw DegenerateGeometryError("landmark coincides with platform position");
    }
    return RangeBearing{r, wrap_angle(std::atan2(dy, dx) - pose.theta)};
}

Eigen::MatrixXd jacobian_h(const AugmentedState& state, int landmark_index) {
    const Pose pose = state.pose();
    const Eigen::Vector2d lm = state.landmark(landmark_index);
    const double dx = lm.x() - pose.x;
    const double dy = lm.y() - pose.y;
    const double r2 = dx * dx + dy * dy;
    const double r = std::sqrt(r2);
    if (r <= kMinRange) {
        throw DegenerateGeometryError("landmark coincides with platform position");
    }

    Eigen::MatrixXd h = Eigen::MatrixXd::Zero(2, state.dim());
    const int c = 3 + 2 * landmark_index;
    h(0, 0) = -dx / r;
    h(0, 1) = -dy / r;
    h(0, c) = dx / r;
    h(0, c + 1) = dy / r;
    h(1, 0) = dy / r2;
    h(1, 1) = -dx / r2;
    h(1, 2) = -1.0;
    h(1, c) = -dy / r2;
    h(1, c + 1) = dx / r2;
    return h;
}

InnovationStats innovation_stats(const AugmentedState& state, int landmark_index,
                                 const Eigen::Matrix2d& R) {
    const Eigen::MatrixXd h = jacobian_h(state, landmark_index);
    Eigen::Matrix2d S = h * state.covariance() * h.transpose() + R;
    S = ((S + S.transpose()) / 2.0).eval();

    const Eigen::SelfAdjointEigenSolver<Eigen::Matrix2d> eig(S, Eigen::EigenvaluesOnly);
    const double lo = eig.eigenvalues()(0);
    const double hi = eig.eigenvalues()(1);
    if (lo <= 0.0 || hi / lo > kMaxConditionNumber) {
        throw NumericalStateError("innovation covariance is not invertible (eigenvalues " +
                                  std::to_string(lo) + ", " + std::to_string(hi) + ")");
    }

    InnovationStats out;
    out.S = S;
    out.W = state.covariance() * h.transpose() * S.inverse();
    return out;
}

double log_likelihood_distance(const RadarDetection& z, const AugmentedState& state,
                               int landmark_index) {
    // A singular S is the zero-measurement-noise limit: any innovation off
    // its column space is infinitely unlikely, so the distance saturates at
    // +inf (fails every association gate, passes every new-landmark gate)
    // instead of tearing the run down.
    InnovationStats stats;
    try {
        stats = innovation_stats(state, landmark_index, z.R);
    } catch (const NumericalStateError&) {
        return std::numeric_limits<double>::infinity();
    }
    const RangeBearing predicted = measure(state.pose(), state.landmark(landmark_index));

    Eigen::Vector2d e;
    e << z.r - predicted.r, wrap_angle(z.phi - predicted.phi);

    const double det = stats.S.determinant();
    return 0.5 * e.dot(stats.S.inverse() * e) +
           0.5 * std::log(4.0 * M_PI * M_PI * det);
}

}  // namespace radar_slam
