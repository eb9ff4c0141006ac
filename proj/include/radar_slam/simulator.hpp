#pragma once

#include <vector>

#include <Eigen/Core>

#include "radar_slam/measurement.hpp"
#include "radar_slam/motion.hpp"
#include "radar_slam/rng.hpp"
#include "radar_slam/state.hpp"

namespace radar_slam {

/// Parked vehicle ground truth: an oriented rectangle present over
/// [birth_step, depart_step). depart_step < 0 means it never leaves.
struct VehicleTruth {
    int id = 0;
    Eigen::Vector2d center = Eigen::Vector2d::Zero();
    double length = 4.5;       // m, along the orientation axis
    double width = 2.0;        // m
    double orientation = 0.0;  // rad
    int birth_step = 0;
    int depart_step = -1;

    bool present_at(int k) const {
        return k >= birth_step && (depart_step < 0 || k < depart_step);
    }
};

/// Point-to-rectangle distance in meters; zero inside.
double rectangle_distance(const VehicleTruth& vehicle, const Eigen::Vector2d& point);

/// Uniform draw over the rectangle interior.
Eigen::Vector2d sample_rectangle_point(const VehicleTruth& vehicle, Rng& rng);

/// Fraction of the rectangle perimeter facing the viewer, normalized so that
/// seeing two full adjacent sides gives 1. Used to modulate detection counts
/// with the aspect angle.
double visible_perimeter_fraction(const VehicleTruth& vehicle, const Eigen::Vector2d& viewer);

/// A scripted burst of concentrated clutter (count extra false detections per
/// frame over [first_step, last_step], uniform in a disc).
struct ClutterBurst {
    int first_step = 0;
    int last_step = 0;
    Eigen::Vector2d center = Eigen::Vector2d::Zero();
    double radius = 1.0;
    int count = 0;
};

struct TrajectorySegment {
    int steps = 0;
    ControlInput u;
};

/// Ground-truth car-park world and platform trajectory.
struct Scene {
    Pose initial_pose;
    std::vector<VehicleTruth> vehicles;
    std::vector<TrajectorySegment> trajectory;  // piecewise-constant controls
    std::vector<ClutterBurst> bursts;
    double clutter_rate = 2.0;       // expected false detections per frame
    double detections_lambda = 8.0;  // base reflecting-point mean per vehicle
    int steps = 0;                   // K
    double dt = 0.16;                // s
    double r_max = 20.0;             // m

    /// Control for step k (1-based); the last segment extends if the
    /// trajectory is shorter than K.
    ControlInput control_at(int k) const;
};

/// Everything the filter is never shown: true pose and per-detection origins
/// (vehicle id, or -1 for clutter).
struct FrameTruth {
    int k = 0;
    Pose true_pose;
    std::vector<RadarDetection> detections;
    std::vector<int> origins;
};

/// Draws one radar frame: per in-range vehicle, an aspect-modulated count of
/// reflecting points uniform over its rectangle, polar-converted and
/// noise-corrupted; plus Poisson clutter uniform over the sensor disc. Any
/// detection with noisy range beyond r_max is dropped.
FrameTruth generate_frame(const Scene& scene, int k, const Pose& true_pose,
                          const Eigen::Matrix2d& R, Rng& rng);

/// Additive Gaussian corruption of the true control; U is echoed into the
/// reading for the filter.
OdometryReading generate_odometry(const ControlInput& u, const Eigen::Matrix2d& U, Rng& rng);

/// Truth kinematics: same arithmetic as the filter's pose propagation.
Pose step_truth(const Pose& pose, const ControlInput& u, double dt);

}  // namespace radar_slam
