#pragma once

#include <cstdint>
#include <string>
#include <utility>
#include <vector>

#include "radar_slam/manager.hpp"
#include "radar_slam/scenario.hpp"
#include "radar_slam/simulator.hpp"
#include "radar_slam/state.hpp"

namespace radar_slam {

struct LandmarkSnap {
    long id = 0;
    double px = 0.0;
    double py = 0.0;
};

struct StepEvents {
    std::vector<long> included_ids;
    std::vector<int> included_rules;                  // parallel to included_ids
    std::vector<long> removed_ids;                    // M/N removals
    std::vector<std::pair<long, long>> merged_pairs;  // (survivor, removed)
};

/// Everything recorded about one recursion step; drives metrics, replay
/// comparison and plot output.
struct StepLog {
    int k = 0;
    Pose true_pose;  // filled by run(); untouched by Filter::step
    Pose predicted_pose;
    Pose posterior_pose;
    std::vector<LandmarkSnap> landmarks;  // end-of-step registry
    StepEvents events;
    int n_detections = 0;
    int n_sifted = 0;
    int n_remainder = 0;
    int n_clusters = 0;
    int n_noise = 0;
    int n_associations = 0;
    double max_update_trace_delta = 0.0;  // worst single-update trace change
    double min_cov_eigenvalue = 0.0;      // at end of step
    double max_cov_asymmetry = 0.0;       // at end of step
};

/// One filter instance: augmented state plus the landmark/track bookkeeping.
/// Runs the per-step recursion in the fixed order
///   predict -> sift -> associate/update -> removal -> cluster ->
///   confirm/include -> merge.
class Filter {
public:
    Filter(const Pose& initial_pose, const ManagerConfig& cfg, const Eigen::Matrix3d& Q);

    /// Executes one recursion step. Numerical-state errors propagate to the
    /// caller with the state left as-is (the run is considered aborted).
    StepLog step(int k, const std::vector<RadarDetection>& detections,
                 const OdometryReading& odo, double dt);

    const AugmentedState& state() const { return state_; }
    const std::vector<LandmarkRecord>& records() const { return records_; }
    const std::vector<CandidateTrack>& tracks() const { return tracks_; }

private:
    AugmentedState state_;
    std::vector<LandmarkRecord> records_;
    std::vector<CandidateTrack> tracks_;
    ManagerConfig cfg_;
    Eigen::Matrix3d process_noise_;
    long next_landmark_id_ = 0;
};

struct RunResult {
    std::vector<StepLog> logs;
    AugmentedState final_state;
    std::vector<LandmarkRecord> final_records;
    bool aborted = false;
    int abort_step = -1;
    std::string abort_reason;
};

/// Simulates the scenario and runs the filter over it in lockstep, one RNG
/// stream for the whole run. Deterministic in (scenario, seed).
RunResult run_scenario(const Scenario& scenario, std::uint64_t seed);

/// As run_scenario, but also hands every generated frame to the caller
/// (snapshot output needs the raw detections).
RunResult run_scenario(const Scenario& scenario, std::uint64_t seed,
                       std::vector<FrameTruth>* frames_out);

}  // namespace radar_slam
