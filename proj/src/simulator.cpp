#include "radar_slam/simulator.hpp"

#include <cmath>

#include "radar_slam/angles.hpp"
#include "radar_slam/manager.hpp"

namespace radar_slam {

namespace {

Eigen::Matrix2d rotation(double angle) {
    Eigen::Matrix2d rot;
    rot << std::cos(angle), -std::sin(angle), std::sin(angle), std::cos(angle);
    return rot;
}

}  // namespace

double rectangle_distance(const VehicleTruth& vehicle, const Eigen::Vector2d& point) {
    const Eigen::Vector2d local = rotation(-vehicle.orientation) * (point - vehicle.center);
    const double ex = std::max(std::abs(local.x()) - vehicle.length / 2.0, 0.0);
    const double ey = std::max(std::abs(local.y()) - vehicle.width / 2.0, 0.0);
    return std::hypot(ex, ey);
}

Eigen::Vector2d sample_rectangle_point(const VehicleTruth& vehicle, Rng& rng) {
    const Eigen::Vector2d local(rng.uniform(-vehicle.length / 2.0, vehicle.length / 2.0),
                                rng.uniform(-vehicle.width / 2.0, vehicle.width / 2.0));
    return vehicle.center + rotation(vehicle.orientation) * local;
}

double visible_perimeter_fraction(const VehicleTruth& vehicle, const Eigen::Vector2d& viewer) {
    // An edge contributes when its outward normal faces the viewer.
    const Eigen::Matrix2d rot = rotation(vehicle.orientation);
    const double half_l = vehicle.length / 2.0;
    const double half_w = vehicle.width / 2.0;

    struct Edge {
        Eigen::Vector2d midpoint_local;
        Eigen::Vector2d normal_local;
        double span;
    };
    const Edge edges[4] = {
        {{half_l, 0.0}, {1.0, 0.0}, vehicle.width},
        {{-half_l, 0.0}, {-1.0, 0.0}, vehicle.width},
        {{0.0, half_w}, {0.0, 1.0}, vehicle.length},
        {{0.0, -half_w}, {0.0, -1.0}, vehicle.length},
    };

    double visible = 0.0;
    for (const Edge& e : edges) {
        const Eigen::Vector2d midpoint = vehicle.center + rot * e.midpoint_local;
        const Eigen::Vector2d normal = rot * e.normal_local;
        if (normal.dot(viewer - midpoint) > 0.0) {
            visible += e.span;
        }
    }
    return visible / (vehicle.length + vehicle.width);
}

ControlInput Scene::control_at(int k) const {
    int step = k - 1;  // steps are 1-based
    for (const TrajectorySegment& seg : trajectory) {
        if (step < seg.steps) {
            return seg.u;
        }
        step -= seg.steps;
    }
    return trajectory.empty() ? ControlInput{} : trajectory.back().u;
}

FrameTruth generate_frame(const Scene& scene, int k, const Pose& true_pose,
                          const Eigen::Matrix2d& R, Rng& rng) {
    FrameTruth frame;
    frame.k = k;
    frame.true_pose = true_pose;
    const Eigen::Vector2d platform(true_pose.x, true_pose.y);

    const auto emit = [&](double r, double phi, int origin) {
        if (r > scene.r_max || r <= 0.0) {
            return;
        }
        RadarDetection z;
        z.r = r;
        z.phi = wrap_angle(phi);
        z.amplitude = rng.uniform();
        z.R = R;
        frame.detections.push_back(z);
        frame.origins.push_back(origin);
    };

    for (const VehicleTruth& vehicle : scene.vehicles) {
        if (!vehicle.present_at(k) || (vehicle.center - platform).norm() > scene.r_max) {
            continue;
        }
        const double lambda =
            scene.detections_lambda * visible_perimeter_fraction(vehicle, platform);
        const int count = std::max(1, rng.poisson(lambda));
        for (int i = 0; i < count; ++i) {
            const Eigen::Vector2d point = sample_rectangle_point(vehicle, rng);
            if ((point - platform).norm() <= 1e-9) {
                continue;  // platform sitting on the reflecting point
            }
            const RangeBearing truth = measure(true_pose, point);
            const Eigen::VectorXd noise = rng.multivariate_normal(R);
            emit(truth.r + noise(0), truth.phi + noise(1), vehicle.id);
        }
    }

    const int n_clutter = rng.poisson(scene.clutter_rate);
    for (int i = 0; i < n_clutter; ++i) {
        // Uniform over the sensor disc, drawn directly in polar coordinates.
        const double r = scene.r_max * std::sqrt(rng.uniform());
        const double phi = rng.uniform(-M_PI, M_PI);
        emit(r, phi, -1);
    }

    for (const ClutterBurst& burst : scene.bursts) {
        if (k < burst.first_step || k > burst.last_step) {
            continue;
        }
        for (int i = 0; i < burst.count; ++i) {
            const double rad = burst.radius * std::sqrt(rng.uniform());
            const double ang = rng.uniform(-M_PI, M_PI);
            const Eigen::Vector2d point =
                burst.center + rad * Eigen::Vector2d(std::cos(ang), std::sin(ang));
            const double range = (point - platform).norm();
            if (range > scene.r_max || range <= 1e-9) {
                continue;
            }
            const RangeBearing truth = measure(true_pose, point);
            emit(truth.r, truth.phi, -1);
        }
    }

    return frame;
}

OdometryReading generate_odometry(const ControlInput& u, const Eigen::Matrix2d& U, Rng& rng) {
    const Eigen::VectorXd noise = rng.multivariate_normal(U);
    OdometryReading odo;
    odo.v_bar = u.v + noise(0);
    odo.psi_bar = u.psi + noise(1);
    odo.U = U;
    return odo;
}

Pose step_truth(const Pose& pose, const ControlInput& u, double dt) {
    return propagate_pose(pose, u, dt);
}

}  // namespace radar_slam
