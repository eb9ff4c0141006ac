#include "radar_slam/manager.hpp"

#include <algorithm>
#include <cmath>
#include <deque>
#include <string>
#include <tuple>

#include "radar_slam/angles.hpp"
#include "radar_slam/errors.hpp"

namespace radar_slam {

void ManagerConfig::validate() const {
    const auto positive = [](const char* name, double v) {
        if (!(v > 0.0)) {
            throw ValidationError(name, "must be > 0");
        }
    };
    positive("gamma_s", gamma_s);
    positive("gamma_c", gamma_c);
    positive("gamma_a", gamma_a);
    positive("gamma_m", gamma_m);
    positive("alpha", alpha);
    positive("beta", beta);
    positive("r_max", r_max);
    if (n_c1 < 1) throw ValidationError("n_c1", "must be >= 1");
    if (n_c2 < 1) throw ValidationError("n_c2", "must be >= 1");
    if (m_init < 1 || n_init < 1 || n_init > m_init) {
        throw ValidationError("init_logic", "needs 1 <= N <= M");
    }
    if (m_rem < 1 || n_rem < 1 || n_rem > m_rem) {
        throw ValidationError("removal_logic", "needs 1 <= N <= M");
    }
    if (!(gamma_m < gamma_s)) {
        throw ValidationError("gamma_m", "must be smaller than gamma_s");
    }
}

Eigen::Vector2d project_detection(const Pose& pose, double r, double phi) {
    return {pose.x + r * std::cos(pose.theta + phi), pose.y + r * std::sin(pose.theta + phi)};
}

SiftResult sift(const std::vector<RadarDetection>& detections, const AugmentedState& state,
                const ManagerConfig& cfg) {
    SiftResult out;
    const Pose pose = state.pose();
    const int n = state.landmark_count();
    for (const RadarDetection& z : detections) {
        const Eigen::Vector2d g = project_detection(pose, z.r, z.phi);
        bool near_landmark = false;
        for (int i = 0; i < n && !near_landmark; ++i) {
            near_landmark = (g - state.landmark(i)).norm() < cfg.gamma_s;
        }
        (near_landmark ? out.candidates : out.remainder).push_back(z);
    }
    return out;
}

AssociationOutcome associate_and_update(AugmentedState& state,
                                        const std::vector<RadarDetection>& candidates,
                                        const ManagerConfig& cfg) {
    const int n_landmarks = state.landmark_count();
    AssociationOutcome out;
    out.hits.assign(static_cast<std::size_t>(n_landmarks), false);
    out.detection_to_landmark.assign(candidates.size(), -1);
    if (n_landmarks == 0 || candidates.empty()) {
        return out;
    }

    // Gate on the predicted state, then hand contested detections to the
    // landmark with the smallest distance (lower index on ties).
    struct GatedPair {
        double distance;
        int landmark;
        int detection;
    };
    std::vector<GatedPair> gated;
    for (int n = 0; n < n_landmarks; ++n) {
        for (int d = 0; d < static_cast<int>(candidates.size()); ++d) {
            const double dist = log_likelihood_distance(candidates[d], state, n);
            if (dist < cfg.beta) {
                gated.push_back({dist, n, d});
            }
        }
    }
    std::sort(gated.begin(), gated.end(), [](const GatedPair& a, const GatedPair& b) {
        return std::tie(a.distance, a.landmark, a.detection) <
               std::tie(b.distance, b.landmark, b.detection);
    });

    std::vector<std::vector<int>> assigned(static_cast<std::size_t>(n_landmarks));
    for (const GatedPair& p : gated) {
        if (out.detection_to_landmark[p.detection] == -1) {
            out.detection_to_landmark[p.detection] = p.landmark;
            assigned[p.landmark].push_back(p.detection);
        }
    }

    // Sequential EKF updates, re-linearized per detection.
    for (int n = 0; n < n_landmarks; ++n) {
        std::sort(assigned[n].begin(), assigned[n].end());
        for (int d : assigned[n]) {
            const RadarDetection& z = candidates[d];
            const InnovationStats stats = innovation_stats(state, n, z.R);
            const RangeBearing predicted = measure(state.pose(), state.landmark(n));
            Eigen::Vector2d e;
            e << z.r - predicted.r, wrap_angle(z.phi - predicted.phi);

            const double trace_before = state.covariance().trace();
            state.set_mean(state.mean() + stats.W * e);
            state.set_covariance(state.covariance() -
                                 stats.W * stats.S * stats.W.transpose());
            out.max_trace_increase =
                std::max(out.max_trace_increase, state.covariance().trace() - trace_before);

            out.hits[n] = true;
            ++out.association_count;
        }
    }
    return out;
}

std::vector<int> removal_pass(const std::vector<LandmarkRecord>& records,
                              const ManagerConfig& cfg) {
    std::vector<int> to_remove;
    for (const LandmarkRecord& rec : records) {
        if (!rec.hit_window.full()) {
            continue;  // not enough history yet
        }
        if (!rec.in_range_window.all_true()) {
            continue;  // out of range at some point: absence proves nothing
        }
        if (rec.hit_window.count_true() < static_cast<std::size_t>(cfg.n_rem)) {
            to_remove.push_back(rec.landmark_index);
        }
    }
    std::sort(to_remove.begin(), to_remove.end());
    return to_remove;
}

std::vector<int> dbscan_labels(const std::vector<Eigen::Vector2d>& points, double eps,
                               int min_points) {
    const int n = static_cast<int>(points.size());
    std::vector<int> labels(n, -1);
    std::vector<bool> visited(n, false);

    const auto neighbors = [&](int i) {
        std::vector<int> out;
        for (int j = 0; j < n; ++j) {
            if ((points[i] - points[j]).norm() <= eps) {
                out.push_back(j);
            }
        }
        return out;
    };

    int next_cluster = 0;
    for (int i = 0; i < n; ++i) {
        if (visited[i]) {
            continue;
        }
        visited[i] = true;
        std::vector<int> seeds = neighbors(i);
        if (static_cast<int>(seeds.size()) < min_points) {
            continue;  // noise unless a later core point claims it
        }
        const int cluster = next_cluster++;
        labels[i] = cluster;
        std::deque<int> queue(seeds.begin(), seeds.end());
        while (!queue.empty()) {
            const int j = queue.front();
            queue.pop_front();
            if (labels[j] == -1) {
                labels[j] = cluster;
            }
            if (visited[j]) {
                continue;
            }
            visited[j] = true;
            std::vector<int> down = neighbors(j);
            if (static_cast<int>(down.size()) >= min_points) {
                queue.insert(queue.end(), down.begin(), down.end());
            }
        }
    }
    return labels;
}

ClusterResult cluster_detections(const std::vector<RadarDetection>& remainder,
                                 const Pose& predicted_pose, const ManagerConfig& cfg) {
    std::vector<Eigen::Vector2d> points;
    points.reserve(remainder.size());
    for (const RadarDetection& z : remainder) {
        points.push_back(project_detection(predicted_pose, z.r, z.phi));
    }
    const std::vector<int> labels = dbscan_labels(points, cfg.gamma_c, cfg.n_c2);

    ClusterResult out;
    int n_clusters = 0;
    for (int label : labels) {
        n_clusters = std::max(n_clusters, label + 1);
        if (label == -1) {
            ++out.noise_count;
        }
    }
    out.clusters.resize(static_cast<std::size_t>(n_clusters));
    for (int d = 0; d < static_cast<int>(remainder.size()); ++d) {
        if (labels[d] >= 0) {
            out.clusters[labels[d]].members.push_back(remainder[d]);
        }
    }
    for (Cluster& c : out.clusters) {
        c.center_index = 0;
        for (int m = 1; m < static_cast<int>(c.members.size()); ++m) {
            if (c.members[m].amplitude > c.members[c.center_index].amplitude) {
                c.center_index = m;
            }
        }
        out.centers_global.push_back(
            project_detection(predicted_pose, c.center().r, c.center().phi));
    }
    return out;
}

namespace {

bool cluster_is_eligible(const RadarDetection& center, const AugmentedState& state,
                         double alpha) {
    for (int n = 0; n < state.landmark_count(); ++n) {
        if (log_likelihood_distance(center, state, n) <= alpha) {
            return false;
        }
    }
    return true;  // vacuously eligible with no landmarks
}

}  // namespace

std::vector<ConfirmedCluster> confirm(const ClusterResult& clusters,
                                      std::vector<CandidateTrack>& tracks,
                                      const AugmentedState& state, const ManagerConfig& cfg) {
    std::vector<ConfirmedCluster> confirmed;

    // Rule 1 takes the large eligible clusters immediately; the small ones go
    // through the candidate tracks.
    std::vector<int> pending;
    for (int c = 0; c < static_cast<int>(clusters.clusters.size()); ++c) {
        const Cluster& cluster = clusters.clusters[c];
        if (!cluster_is_eligible(cluster.center(), state, cfg.alpha)) {
            continue;
        }
        if (static_cast<int>(cluster.members.size()) >= cfg.n_c1) {
            confirmed.push_back({cluster, 1});
        } else {
            pending.push_back(c);
        }
    }

    // One-to-one track/cluster matching, nearest center pair first.
    struct MatchPair {
        double distance;
        int track;
        int cluster;  // index into `pending`
    };
    std::vector<MatchPair> pairs;
    for (int t = 0; t < static_cast<int>(tracks.size()); ++t) {
        for (int p = 0; p < static_cast<int>(pending.size()); ++p) {
            const double d =
                (tracks[t].last_center_global - clusters.centers_global[pending[p]]).norm();
            if (d < cfg.gamma_a) {
                pairs.push_back({d, t, p});
            }
        }
    }
    std::sort(pairs.begin(), pairs.end(), [](const MatchPair& a, const MatchPair& b) {
        return std::tie(a.distance, a.track, a.cluster) <
               std::tie(b.distance, b.track, b.cluster);
    });

    std::vector<int> track_match(tracks.size(), -1);
    std::vector<bool> cluster_matched(pending.size(), false);
    for (const MatchPair& p : pairs) {
        if (track_match[p.track] == -1 && !cluster_matched[p.cluster]) {
            track_match[p.track] = p.cluster;
            cluster_matched[p.cluster] = true;
        }
    }

    std::vector<CandidateTrack> survivors;
    survivors.reserve(tracks.size() + pending.size());
    for (int t = 0; t < static_cast<int>(tracks.size()); ++t) {
        CandidateTrack& track = tracks[t];
        if (track_match[t] >= 0) {
            const int c = pending[track_match[t]];
            track.hit_window.push(true);
            track.last_center_global = clusters.centers_global[c];
            track.last_cluster = clusters.clusters[c];
            track.consecutive_misses = 0;
            if (track.hit_window.count_true() >= static_cast<std::size_t>(cfg.n_init)) {
                confirmed.push_back({clusters.clusters[c], 2});
                continue;  // track retires on confirmation
            }
        } else {
            track.hit_window.push(false);
            ++track.consecutive_misses;
            if (track.consecutive_misses >= cfg.m_init) {
                continue;  // stale track dropped
            }
        }
        survivors.push_back(std::move(track));
    }

    // Unmatched clusters spawn fresh tracks.
    for (int p = 0; p < static_cast<int>(pending.size()); ++p) {
        if (cluster_matched[p]) {
            continue;
        }
        const int c = pending[p];
        CandidateTrack track;
        track.hit_window = BoolRing(static_cast<std::size_t>(cfg.m_init));
        track.hit_window.push(true);
        track.last_center_global = clusters.centers_global[c];
        track.last_cluster = clusters.clusters[c];
        if (track.hit_window.count_true() >= static_cast<std::size_t>(cfg.n_init)) {
            confirmed.push_back({clusters.clusters[c], 2});  // 1-of-M logic
        } else {
            survivors.push_back(std::move(track));
        }
    }

    tracks = std::move(survivors);
    return confirmed;
}

std::pair<Eigen::Matrix<double, 2, 3>, Eigen::Matrix2d> inclusion_jacobians(const Pose& pose,
                                                                             double r,
                                                                             double phi) {
    const double angle = pose.theta + phi;
    const double s = std::sin(angle);
    const double c = std::cos(angle);

    Eigen::Matrix<double, 2, 3> g_pose;
    g_pose << 1.0, 0.0, -r * s,
              0.0, 1.0, r * c;

    Eigen::Matrix2d g_center;
    g_center << c, -r * s,
                s, r * c;
    return {g_pose, g_center};
}

void include_landmark(AugmentedState& state, const RadarDetection& center) {
    const Pose pose = state.pose();
    const Eigen::Vector2d position = project_detection(pose, center.r, center.phi);
    const auto [g_pose, g_center] = inclusion_jacobians(pose, center.r, center.phi);

    // Block form of J1 P J1^T + J2 R J2^T: only the new rows/columns are new.
    const Eigen::MatrixXd cross = g_pose * state.covariance().topRows(3);
    const Eigen::Matrix2d block =
        g_pose * state.covariance().topLeftCorner<3, 3>() * g_pose.transpose() +
        g_center * center.R * g_center.transpose();
    state.append_landmark(position, cross, block);
}

std::vector<std::pair<long, long>> merge_pass(AugmentedState& state,
                                              std::vector<LandmarkRecord>& records,
                                              const ManagerConfig& cfg) {
    std::vector<std::pair<long, long>> merged;
    while (true) {
        int best_i = -1;
        int best_j = -1;
        double best_d = cfg.gamma_m;
        const int n = state.landmark_count();
        for (int i = 0; i < n; ++i) {
            for (int j = i + 1; j < n; ++j) {
                const double d = (state.landmark(i) - state.landmark(j)).norm();
                if (d < best_d) {
                    best_d = d;
                    best_i = i;
                    best_j = j;
                }
            }
        }
        if (best_i < 0) {
            break;
        }

        const auto own_trace = [&](int idx) {
            return state.covariance().block<2, 2>(3 + 2 * idx, 3 + 2 * idx).trace();
        };
        // The worse-estimated landmark goes; equal traces keep the lower index.
        const int removed = own_trace(best_i) > own_trace(best_j) ? best_i : best_j;
        const int survivor = removed == best_i ? best_j : best_i;

        long removed_id = -1;
        long survivor_id = -1;
        for (const LandmarkRecord& rec : records) {
            if (rec.landmark_index == removed) removed_id = rec.id;
            if (rec.landmark_index == survivor) survivor_id = rec.id;
        }
        merged.emplace_back(survivor_id, removed_id);

        const std::vector<int> removal{removed};
        state.remove_landmarks(removal);
        apply_removal_to_records(records, removal);
    }
    return merged;
}

}  // namespace radar_slam
