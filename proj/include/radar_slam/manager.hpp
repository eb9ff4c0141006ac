#pragma once

#include <utility>
#include <vector>

#include <Eigen/Core>

#include "radar_slam/measurement.hpp"
#include "radar_slam/motion.hpp"
#include "radar_slam/state.hpp"

namespace radar_slam {

/// Thresholds and window logics for the landmark lifecycle. Defaults are the
/// simulation parameter set the scheme was designed around.
struct ManagerConfig {
    double gamma_s = 3.0;   // sifting radius, m
    double gamma_c = 2.5;   // clustering epsilon, m
    double gamma_a = 3.5;   // cluster-to-track association distance, m
    double gamma_m = 1.5;   // merging distance, m
    double alpha = 500.0;   // new-landmark log-likelihood distance gate
    double beta = 20.0;     // association log-likelihood distance gate
    int n_c1 = 6;           // cluster size for immediate confirmation
    int n_c2 = 2;           // DBSCAN minimum points
    int m_init = 5;         // confirmation window length
    int n_init = 3;         // hits required within m_init
    int m_rem = 10;         // removal window length
    int n_rem = 2;          // hits required within m_rem to survive
    double r_max = 20.0;    // sensor range, m

    /// Throws ValidationError on an unusable combination.
    void validate() const;
};

/// Group of detections presumed to come from one object; the center is the
/// member with the largest return.
struct Cluster {
    std::vector<RadarDetection> members;
    int center_index = 0;

    const RadarDetection& center() const { return members[center_index]; }
};

/// Unconfirmed cluster track accumulating multi-frame evidence. Only the last
/// center is remembered; matching is one-step.
struct CandidateTrack {
    Eigen::Vector2d last_center_global = Eigen::Vector2d::Zero();
    BoolRing hit_window;  // capacity m_init
    Cluster last_cluster;
    int consecutive_misses = 0;
};

/// Maps a sensor-frame detection into the global frame through a pose.
Eigen::Vector2d project_detection(const Pose& pose, double r, double phi);

struct SiftResult {
    std::vector<RadarDetection> candidates;  // near a registered landmark
    std::vector<RadarDetection> remainder;   // everything else
};

/// Coarse pre-gate: a detection is a candidate iff its global projection
/// (through the predicted pose) lies strictly within gamma_s of at least one
/// registered landmark. The two output sets partition the input.
SiftResult sift(const std::vector<RadarDetection>& detections, const AugmentedState& state,
                const ManagerConfig& cfg);

struct AssociationOutcome {
    std::vector<bool> hits;                 // per landmark: associated this frame?
    std::vector<int> detection_to_landmark; // per candidate: winner index or -1
    int association_count = 0;
    double max_trace_increase = 0.0;        // worst single-update trace change
};

/// Gates candidate detections per landmark by log-likelihood distance < beta,
/// resolves contention toward the smallest distance (lower landmark index on
/// ties), then applies the winners as sequential EKF updates with
/// re-linearization between detections. Each detection updates at most one
/// landmark. Mutates `state`.
AssociationOutcome associate_and_update(AugmentedState& state,
                                        const std::vector<RadarDetection>& candidates,
                                        const ManagerConfig& cfg);

/// M/N removal pass. A landmark is flagged iff its window is full, it was in
/// range for every frame of the window, and it collected fewer than n_rem
/// hits. Windows must already contain the current frame. Returns sorted
/// landmark indices.
std::vector<int> removal_pass(const std::vector<LandmarkRecord>& records,
                              const ManagerConfig& cfg);

/// Plain DBSCAN over 2D points: returns one label per point, -1 for noise.
/// Neighborhoods are closed balls of radius eps and include the point itself.
std::vector<int> dbscan_labels(const std::vector<Eigen::Vector2d>& points, double eps,
                               int min_points);

struct ClusterResult {
    std::vector<Cluster> clusters;
    std::vector<Eigen::Vector2d> centers_global;  // per cluster, via predicted pose
    int noise_count = 0;
};

/// Clusters the post-sift remainder in global Cartesian coordinates
/// (projected through the predicted pose). Noise points are dropped.
ClusterResult cluster_detections(const std::vector<RadarDetection>& remainder,
                                 const Pose& predicted_pose, const ManagerConfig& cfg);

struct ConfirmedCluster {
    Cluster cluster;
    int rule = 0;  // 1 = size gate, 2 = multi-frame logic
};

/// Rule-based confirmation. Clusters whose center is within the alpha gate of
/// any registered landmark are discarded. Large eligible clusters confirm
/// immediately; the rest run through candidate tracks with M/N logic. Mutates
/// `tracks`.
std::vector<ConfirmedCluster> confirm(const ClusterResult& clusters,
                                      std::vector<CandidateTrack>& tracks,
                                      const AugmentedState& state, const ManagerConfig& cfg);

/// Registers a confirmed cluster center as a new landmark: mean through the
/// polar-to-global map, covariance J1 P J1^T + J2 R J2^T. Mutates `state`.
void include_landmark(AugmentedState& state, const RadarDetection& center);

/// Jacobians of the polar-to-global landmark map g(pose, r, phi), exposed for
/// verification: first is d g / d pose (2x3), second is d g / d [r, phi] (2x2).
std::pair<Eigen::Matrix<double, 2, 3>, Eigen::Matrix2d> inclusion_jacobians(const Pose& pose,
                                                                             double r,
                                                                             double phi);

/// Merges landmark pairs closer than gamma_m, nearest pair first; the member
/// with the larger own-block covariance trace is removed (higher index on
/// ties). Records are dropped/reindexed alongside. Returns (survivor id,
/// removed id) pairs. Post: all pairwise distances >= gamma_m.
std::vector<std::pair<long, long>> merge_pass(AugmentedState& state,
                                              std::vector<LandmarkRecord>& records,
                                              const ManagerConfig& cfg);

}  // namespace radar_slam
