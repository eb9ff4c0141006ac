#include "radar_slam/slam.hpp"

#include <string>

#include "radar_slam/errors.hpp"

namespace radar_slam {

Filter::Filter(const Pose& initial_pose, const ManagerConfig& cfg, const Eigen::Matrix3d& Q)
    : state_(initial_pose, 1e-6 * Eigen::Matrix3d::Identity()),
      cfg_(cfg),
      process_noise_(Q) {
    cfg_.validate();
}

StepLog Filter::step(int k, const std::vector<RadarDetection>& detections,
                     const OdometryReading& odo, double dt) {
    StepLog log;
    log.k = k;
    log.n_detections = static_cast<int>(detections.size());

    // Prediction.
    state_ = predict(state_, odo, process_noise_, dt);
    const Pose predicted_pose = state_.pose();
    log.predicted_pose = predicted_pose;

    // Sifting splits the point cloud into association candidates and
    // new-object material.
    const SiftResult sifted = sift(detections, state_, cfg_);
    log.n_sifted = static_cast<int>(sifted.candidates.size());
    log.n_remainder = static_cast<int>(sifted.remainder.size());

    // Association + sequential EKF updates.
    const AssociationOutcome assoc = associate_and_update(state_, sifted.candidates, cfg_);
    log.n_associations = assoc.association_count;
    log.max_update_trace_delta = assoc.max_trace_increase;

    // Window bookkeeping for the current frame, then the removal pass.
    const Eigen::Vector2d platform(predicted_pose.x, predicted_pose.y);
    for (LandmarkRecord& rec : records_) {
        rec.hit_window.push(assoc.hits[rec.landmark_index]);
        const bool in_range =
            (state_.landmark(rec.landmark_index) - platform).norm() <= cfg_.r_max;
        rec.in_range_window.push(in_range);
    }
    const std::vector<int> removals = removal_pass(records_, cfg_);
    for (int idx : removals) {
        for (const LandmarkRecord& rec : records_) {
            if (rec.landmark_index == idx) {
                log.events.removed_ids.push_back(rec.id);
            }
        }
    }
    state_.remove_landmarks(removals);
    apply_removal_to_records(records_, removals);

    // New-landmark pipeline: cluster -> rule confirmation -> inclusion.
    const ClusterResult clusters = cluster_detections(sifted.remainder, predicted_pose, cfg_);
    log.n_clusters = static_cast<int>(clusters.clusters.size());
    log.n_noise = clusters.noise_count;

    const std::vector<ConfirmedCluster> confirmed = confirm(clusters, tracks_, state_, cfg_);
    for (const ConfirmedCluster& c : confirmed) {
        include_landmark(state_, c.cluster.center());
        LandmarkRecord rec;
        rec.landmark_index = state_.landmark_count() - 1;
        rec.id = next_landmark_id_++;
        rec.birth_step = k;
        rec.hit_window = BoolRing(static_cast<std::size_t>(cfg_.m_rem));
        rec.in_range_window = BoolRing(static_cast<std::size_t>(cfg_.m_rem));
        records_.push_back(rec);
        log.events.included_ids.push_back(rec.id);
        log.events.included_rules.push_back(c.rule);
    }

    log.events.merged_pairs = merge_pass(state_, records_, cfg_);

    // End-of-step snapshot and health numbers.
    log.posterior_pose = state_.pose();
    log.landmarks.reserve(records_.size());
    for (const LandmarkRecord& rec : records_) {
        const Eigen::Vector2d p = state_.landmark(rec.landmark_index);
        log.landmarks.push_back({rec.id, p.x(), p.y()});
    }
    log.min_cov_eigenvalue = state_.min_covariance_eigenvalue();
    log.max_cov_asymmetry = state_.max_covariance_asymmetry();
    return log;
}

RunResult run_scenario(const Scenario& scenario, std::uint64_t seed) {
    return run_scenario(scenario, seed, nullptr);
}

RunResult run_scenario(const Scenario& scenario, std::uint64_t seed,
                       std::vector<FrameTruth>* frames_out) {
    scenario.validate();
    const Scene& scene = scenario.scene;

    Rng rng(seed);
    Filter filter(scene.initial_pose, scenario.manager, scenario.Q);
    RunResult result;
    result.logs.reserve(static_cast<std::size_t>(scene.steps));

    Pose true_pose = scene.initial_pose;
    for (int k = 1; k <= scene.steps; ++k) {
        const ControlInput u = scene.control_at(k);
        true_pose = step_truth(true_pose, u, scene.dt);
        const FrameTruth frame = generate_frame(scene, k, true_pose, scenario.R, rng);
        const OdometryReading odo = generate_odometry(u, scenario.U, rng);

        try {
            StepLog log = filter.step(k, frame.detections, odo, scene.dt);
            log.true_pose = true_pose;
            result.logs.push_back(std::move(log));
        } catch (const NumericalStateError& err) {
            result.aborted = true;
            result.abort_step = k;
            result.abort_reason = err.what();
            break;
        }

        if (frames_out != nullptr) {
            frames_out->push_back(frame);
        }
    }

    result.final_state = filter.state();
    result.final_records = filter.records();
    return result;
}

}  // namespace radar_slam
