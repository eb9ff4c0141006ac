#pragma once

#include <vector>

#include <Eigen/Core>

#include "radar_slam/ring.hpp"

namespace radar_slam {

/// Platform pose; theta is kept wrapped to (-pi, pi].
struct Pose {
    double x = 0.0;
    double y = 0.0;
    double theta = 0.0;
};

/// Joint platform + landmark state with full covariance.
///
/// Layout of the mean: [x, y, theta, p1x, p1y, ..., pNx, pNy], so the side
/// length of the covariance is always 3 + 2N. The covariance is re-symmetrized
/// after every write; structural edits (append/remove) keep the surviving
/// entries bit-identical.
class AugmentedState {
public:
    /// Known initial pose, no landmarks, small diagonal pose covariance.
    AugmentedState();
    AugmentedState(const Pose& pose, const Eigen::Matrix3d& pose_cov);

    int landmark_count() const { return static_cast<int>((x_.size() - 3) / 2); }
    int dim() const { return static_cast<int>(x_.size()); }

    Pose pose() const { return Pose{x_(0), x_(1), x_(2)}; }
    void set_pose(const Pose& p);

    Eigen::Vector2d landmark(int i) const;
    void set_landmark(int i, const Eigen::Vector2d& position);

    const Eigen::VectorXd& mean() const { return x_; }
    const Eigen::MatrixXd& covariance() const { return P_; }

    /// Replaces the mean; the dimension must match and theta is re-wrapped.
    void set_mean(const Eigen::VectorXd& mean);

    /// Replaces the covariance (symmetrized); the dimension must match.
    void set_covariance(const Eigen::MatrixXd& cov);

    /// Appends one landmark. `cross_cov` is the new landmark's 2x(3+2N)
    /// covariance against the existing state, `block_cov` its own 2x2 block.
    void append_landmark(const Eigen::Vector2d& position,
                         const Eigen::MatrixXd& cross_cov,
                         const Eigen::Matrix2d& block_cov);

    /// Removes the given landmarks (any order, must be distinct and valid).
    /// Survivors keep their relative order; their covariance entries are
    /// copied over unchanged.
    void remove_landmarks(const std::vector<int>& indices);

    double min_covariance_eigenvalue() const;
    double max_covariance_asymmetry() const;

private:
    void symmetrize();

    Eigen::VectorXd x_;
    Eigen::MatrixXd P_;
};

/// Per-landmark bookkeeping for the removal logic. `id` is stable across the
/// landmark's lifetime; `landmark_index` tracks its current slot in the state.
struct LandmarkRecord {
    int landmark_index = 0;
    long id = 0;
    int birth_step = 0;
    BoolRing hit_window;       // associated with >=1 detection this frame?
    BoolRing in_range_window;  // within R_max of the predicted pose this frame?
};

/// Drops records of removed landmarks and shifts the indices of survivors.
/// `removed` must be sorted ascending.
void apply_removal_to_records(std::vector<LandmarkRecord>& records,
                              const std::vector<int>& removed);

}  // namespace radar_slam
