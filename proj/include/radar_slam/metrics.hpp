#pragma once

#include <cstdint>
#include <utility>
#include <vector>

#include "radar_slam/scenario.hpp"
#include "radar_slam/slam.hpp"

namespace radar_slam {

/// Estimated landmarks farther than this from every truth rectangle count as
/// false; one vehicle length scale.
constexpr double kMatchRadius = 2.5;

struct PoseErrors {
    double position_rmse = 0.0;     // m
    double heading_rmse_deg = 0.0;  // deg, wrapped before squaring
};

/// RMSE of the posterior pose against truth over all logged steps.
PoseErrors pose_errors(const std::vector<StepLog>& logs);

struct MatchResult {
    std::vector<std::pair<int, int>> pairs;  // (landmark index, vehicle index)
    std::vector<int> false_landmarks;        // landmark indices
    std::vector<int> missed_vehicles;        // vehicle indices
};

/// Greedy nearest-first one-to-one matching between estimated landmarks and
/// truth rectangles using point-to-rectangle distance (zero inside). Pairs
/// beyond `radius` never match.
MatchResult landmark_matching(const std::vector<LandmarkSnap>& landmarks,
                              const std::vector<VehicleTruth>& vehicles, double radius);

struct DelaySamples {
    std::vector<int> inclusion;         // per vehicle, frames after first visibility
    std::vector<int> departed_removal;  // per departed vehicle
    std::vector<int> false_removal;     // per removed false landmark
};

/// Extracts lifecycle delays from a run.
/// Inclusion: frames strictly after a vehicle's first in-range step until a
/// landmark matches its rectangle (0 = same step). Removal: for a departed
/// vehicle, frames from its empty location re-entering the sensor range until
/// its landmark is removed, counting both endpoints; for a false landmark,
/// steps from inclusion to removal.
DelaySamples delays(const std::vector<StepLog>& logs, const Scene& scene,
                    double radius = kMatchRadius);

struct RunMetrics {
    double position_rmse = 0.0;
    double heading_rmse_deg = 0.0;
    double landmark_mae = 0.0;  // NaN when no landmark matched
    std::vector<int> inclusion_delays;
    std::vector<int> removal_delays;
    int false_landmarks = 0;
    int missed_landmarks = 0;
};

/// Full per-run metric suite, evaluated at the final step.
RunMetrics compute_run_metrics(const std::vector<StepLog>& logs, const Scene& scene,
                               double radius = kMatchRadius);

struct AggregateMetrics {
    int runs = 0;
    double position_rmse = 0.0;
    double heading_rmse_deg = 0.0;
    double landmark_mae = 0.0;
    double inclusion_mean_delay = 0.0;  // pooled over runs, NaN if no samples
    double removal_mean_delay = 0.0;    // pooled over runs, NaN if no samples
    double mean_false = 0.0;
    int max_false = 0;
    double mean_missed = 0.0;
    int max_missed = 0;
};

/// Order-independent reduction of per-run metrics (values are sorted before
/// summing, so shuffling the runs reproduces identical aggregates).
AggregateMetrics aggregate_metrics(const std::vector<RunMetrics>& runs);

struct MonteCarloResult {
    std::vector<RunMetrics> per_run;  // completed runs only, in seed order
    AggregateMetrics aggregate;
    int aborted_runs = 0;
};

/// Executes `runs` independent seeded simulations in parallel and aggregates.
/// Seeds come from the scenario's list, extended as 1,2,3,... when shorter
/// than `runs`. Runs that abort on a numerical-state error are counted but
/// excluded from the aggregate.
MonteCarloResult monte_carlo(const Scenario& scenario, int runs);

}  // namespace radar_slam
