#include "radar_slam/state.hpp"

#include <algorithm>
#include <cmath>
#include <string>

#include <Eigen/Eigenvalues>

#include "radar_slam/angles.hpp"
#include "radar_slam/errors.hpp"

namespace radar_slam {

namespace {
constexpr double kInitialPoseVariance = 1e-6;
}

AugmentedState::AugmentedState()
    : AugmentedState(Pose{}, kInitialPoseVariance * Eigen::Matrix3d::Identity()) {}

AugmentedState::AugmentedState(const Pose& pose, const Eigen::Matrix3d& pose_cov) {
    x_.resize(3);
    x_ << pose.x, pose.y, wrap_angle(pose.theta);
    P_ = pose_cov;
    symmetrize();
}

void AugmentedState::set_pose(const Pose& p) {
    x_(0) = p.x;
    x_(1) = p.y;
    x_(2) = wrap_angle(p.theta);
}

Eigen::Vector2d AugmentedState::landmark(int i) const {
    if (i < 0 || i >= landmark_count()) {
        throw StructuralError("landmark index " + std::to_string(i) + " out of range");
    }
    return x_.segment<2>(3 + 2 * i);
}

void AugmentedState::set_landmark(int i, const Eigen::Vector2d& position) {
    if (i < 0 || i >= landmark_count()) {
        throw StructuralError("landmark index " + std::to_string(i) + " out of range");
    }
    x_.segment<2>(3 + 2 * i) = position;
}

void AugmentedState::set_mean(const Eigen::VectorXd& mean) {
    if (mean.size() != x_.size()) {
        throw StructuralError("mean dimension " + std::to_string(mean.size()) +
                              " does not match state dimension " + std::to_string(x_.size()));
    }
    x_ = mean;
    x_(2) = wrap_angle(x_(2));
}

void AugmentedState::set_covariance(const Eigen::MatrixXd& cov) {
    if (cov.rows() != x_.size() || cov.cols() != x_.size()) {
        throw StructuralError("covariance dimension does not match state dimension " +
                              std::to_string(x_.size()));
    }
    P_ = cov;
    symmetrize();
}

void AugmentedState::append_landmark(const Eigen::Vector2d& position,
                                     const Eigen::MatrixXd& cross_cov,
                                     const Eigen::Matrix2d& block_cov) {
    const int n = dim();
    if (cross_cov.rows() != 2 || cross_cov.cols() != n) {
        throw StructuralError("cross covariance must be 2x" + std::to_string(n));
    }

    Eigen::VectorXd x_new(n + 2);
    x_new.head(n) = x_;
    x_new.tail<2>() = position;

    Eigen::MatrixXd P_new(n + 2, n + 2);
    P_new.topLeftCorner(n, n) = P_;
    P_new.bottomLeftCorner(2, n) = cross_cov;
    P_new.topRightCorner(n, 2) = cross_cov.transpose();
    P_new.bottomRightCorner<2, 2>() = block_cov;

    x_ = std::move(x_new);
    P_ = std::move(P_new);
    symmetrize();
}

void AugmentedState::remove_landmarks(const std::vector<int>& indices) {
    if (indices.empty()) {
        return;
    }
    std::vector<int> sorted = indices;
    std::sort(sorted.begin(), sorted.end());
    if (std::adjacent_find(sorted.begin(), sorted.end()) != sorted.end()) {
        throw StructuralError("duplicate landmark index in removal set");
    }
    if (sorted.front() < 0 || sorted.back() >= landmark_count()) {
        throw StructuralError("landmark removal index out of range");
    }

    // Rows/columns to keep: pose block plus surviving landmark pairs, in order.
    std::vector<int> keep;
    keep.reserve(dim() - 2 * sorted.size());
    for (int i = 0; i < 3; ++i) {
        keep.push_back(i);
    }
    std::size_t next_removed = 0;
    for (int i = 0; i < landmark_count(); ++i) {
        if (next_removed < sorted.size() && sorted[next_removed] == i) {
            ++next_removed;
            continue;
        }
        keep.push_back(3 + 2 * i);
        keep.push_back(3 + 2 * i + 1);
    }

    const int m = static_cast<int>(keep.size());
    Eigen::VectorXd x_new(m);
    Eigen::MatrixXd P_new(m, m);
    for (int r = 0; r < m; ++r) {
        x_new(r) = x_(keep[r]);
        for (int c = 0; c < m; ++c) {
            P_new(r, c) = P_(keep[r], keep[c]);
        }
    }
    x_ = std::move(x_new);
    P_ = std::move(P_new);
    // No symmetrization here: surviving entries stay bit-identical.
}

double AugmentedState::min_covariance_eigenvalue() const {
    Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> solver(P_, Eigen::EigenvaluesOnly);
    return solver.eigenvalues().minCoeff();
}

double AugmentedState::max_covariance_asymmetry() const {
    return (P_ - P_.transpose()).cwiseAbs().maxCoeff();
}

void AugmentedState::symmetrize() {
    P_ = ((P_ + P_.transpose()) / 2.0).eval();
}

void apply_removal_to_records(std::vector<LandmarkRecord>& records,
                              const std::vector<int>& removed) {
    if (removed.empty()) {
        return;
    }
    std::vector<LandmarkRecord> kept;
    kept.reserve(records.size());
    for (const LandmarkRecord& rec : records) {
        if (std::binary_search(removed.begin(), removed.end(), rec.landmark_index)) {
            continue;
        }
        LandmarkRecord shifted = rec;
        const auto below = std::lower_bound(removed.begin(), removed.end(), rec.landmark_index);
        shifted.landmark_index -= static_cast<int>(below - removed.begin());
        kept.push_back(std::move(shifted));
    }
    records = std::move(kept);
}

}  // namespace radar_slam
