#include "radar_slam/metrics.hpp"

#include <algorithm>
#include <atomic>
#include <cmath>
#include <future>
#include <limits>
#include <thread>
#include <tuple>

#include "radar_slam/angles.hpp"

namespace radar_slam {

namespace {

double sorted_mean(std::vector<double> values) {
    if (values.empty()) {
        return std::numeric_limits<double>::quiet_NaN();
    }
    std::sort(values.begin(), values.end());
    double sum = 0.0;
    for (double v : values) {
        sum += v;
    }
    return sum / static_cast<double>(values.size());
}

/// Vehicles that can be mapped at all: present at the final step and within
/// sensor range at least once while present.
std::vector<int> mappable_vehicles(const std::vector<StepLog>& logs, const Scene& scene) {
    std::vector<int> out;
    for (int v = 0; v < static_cast<int>(scene.vehicles.size()); ++v) {
        const VehicleTruth& vehicle = scene.vehicles[v];
        if (!vehicle.present_at(scene.steps)) {
            continue;
        }
        for (const StepLog& log : logs) {
            const Eigen::Vector2d platform(log.true_pose.x, log.true_pose.y);
            if (vehicle.present_at(log.k) &&
                (vehicle.center - platform).norm() <= scene.r_max) {
                out.push_back(v);
                break;
            }
        }
    }
    return out;
}

/// First step at which the vehicle is present and in range; -1 if never.
int first_visible_step(const std::vector<StepLog>& logs, const Scene& scene,
                       const VehicleTruth& vehicle) {
    for (const StepLog& log : logs) {
        const Eigen::Vector2d platform(log.true_pose.x, log.true_pose.y);
        if (vehicle.present_at(log.k) && (vehicle.center - platform).norm() <= scene.r_max) {
            return log.k;
        }
    }
    return -1;
}

const StepLog* log_at(const std::vector<StepLog>& logs, int k) {
    for (const StepLog& log : logs) {
        if (log.k == k) {
            return &log;
        }
    }
    return nullptr;
}

/// Follows a landmark id through merge events from step `from` on and returns
/// the step where the chain is removed by the M/N logic, or -1.
int removal_step_of(const std::vector<StepLog>& logs, long id, int from) {
    long current = id;
    for (const StepLog& log : logs) {
        if (log.k < from) {
            continue;
        }
        for (long removed : log.events.removed_ids) {
            if (removed == current) {
                return log.k;
            }
        }
        for (const auto& [survivor, removed] : log.events.merged_pairs) {
            if (removed == current) {
                current = survivor;  // identity continues in the survivor
            }
        }
    }
    return -1;
}

}  // namespace

PoseErrors pose_errors(const std::vector<StepLog>& logs) {
    PoseErrors out;
    if (logs.empty()) {
        return out;
    }
    double pos_sq = 0.0;
    double heading_sq = 0.0;
    for (const StepLog& log : logs) {
        const double dx = log.posterior_pose.x - log.true_pose.x;
        const double dy = log.posterior_pose.y - log.true_pose.y;
        pos_sq += dx * dx + dy * dy;
        const double dtheta = wrap_angle(log.posterior_pose.theta - log.true_pose.theta);
        heading_sq += dtheta * dtheta;
    }
    const double n = static_cast<double>(logs.size());
    out.position_rmse = std::sqrt(pos_sq / n);
    out.heading_rmse_deg = rad_to_deg(std::sqrt(heading_sq / n));
    return out;
}

MatchResult landmark_matching(const std::vector<LandmarkSnap>& landmarks,
                              const std::vector<VehicleTruth>& vehicles, double radius) {
    struct Pair {
        double distance;
        int landmark;
        int vehicle;
    };
    std::vector<Pair> pairs;
    for (int l = 0; l < static_cast<int>(landmarks.size()); ++l) {
        const Eigen::Vector2d p(landmarks[l].px, landmarks[l].py);
        for (int v = 0; v < static_cast<int>(vehicles.size()); ++v) {
            const double d = rectangle_distance(vehicles[v], p);
            if (d <= radius) {
                pairs.push_back({d, l, v});
            }
        }
    }
    std::sort(pairs.begin(), pairs.end(), [](const Pair& a, const Pair& b) {
        return std::tie(a.distance, a.landmark, a.vehicle) <
               std::tie(b.distance, b.landmark, b.vehicle);
    });

    MatchResult out;
    std::vector<bool> landmark_used(landmarks.size(), false);
    std::vector<bool> vehicle_used(vehicles.size(), false);
    for (const Pair& p : pairs) {
        if (!landmark_used[p.landmark] && !vehicle_used[p.vehicle]) {
            landmark_used[p.landmark] = true;
            vehicle_used[p.vehicle] = true;
            out.pairs.emplace_back(p.landmark, p.vehicle);
        }
    }
    for (int l = 0; l < static_cast<int>(landmarks.size()); ++l) {
        if (!landmark_used[l]) {
            out.false_landmarks.push_back(l);
        }
    }
    for (int v = 0; v < static_cast<int>(vehicles.size()); ++v) {
        if (!vehicle_used[v]) {
            out.missed_vehicles.push_back(v);
        }
    }
    return out;
}

DelaySamples delays(const std::vector<StepLog>& logs, const Scene& scene, double radius) {
    DelaySamples out;

    // Inclusion: per vehicle, first step with a landmark on its rectangle.
    for (const VehicleTruth& vehicle : scene.vehicles) {
        const int k_visible = first_visible_step(logs, scene, vehicle);
        if (k_visible < 0) {
            continue;
        }
        int k_matched = -1;
        for (const StepLog& log : logs) {
            if (log.k < k_visible || !vehicle.present_at(log.k)) {
                continue;
            }
            for (const LandmarkSnap& lm : log.landmarks) {
                if (rectangle_distance(vehicle, {lm.px, lm.py}) <= radius) {
                    k_matched = log.k;
                    break;
                }
            }
            if (k_matched >= 0) {
                break;
            }
        }
        if (k_matched >= 0) {
            out.inclusion.push_back(k_matched - k_visible);
        }
    }

    // Removal, departed vehicles: follow the landmark that was on the vehicle
    // just before departure.
    for (const VehicleTruth& vehicle : scene.vehicles) {
        if (vehicle.depart_step < 0 || vehicle.depart_step > scene.steps) {
            continue;
        }
        const StepLog* before = log_at(logs, vehicle.depart_step - 1);
        if (before == nullptr) {
            continue;
        }
        long landmark_id = -1;
        double best = radius;
        for (const LandmarkSnap& lm : before->landmarks) {
            const double d = rectangle_distance(vehicle, {lm.px, lm.py});
            if (d <= best) {
                best = d;
                landmark_id = lm.id;
            }
        }
        if (landmark_id < 0) {
            continue;  // vehicle was never mapped
        }
        int k_reenter = -1;
        for (const StepLog& log : logs) {
            const Eigen::Vector2d platform(log.true_pose.x, log.true_pose.y);
            if (log.k >= vehicle.depart_step &&
                (vehicle.center - platform).norm() <= scene.r_max) {
                k_reenter = log.k;
                break;
            }
        }
        if (k_reenter < 0) {
            continue;
        }
        const int k_removed = removal_step_of(logs, landmark_id, k_reenter);
        if (k_removed >= 0) {
            out.departed_removal.push_back(k_removed - k_reenter + 1);
        }
    }

    // Removal, false landmarks: counted from their inclusion step.
    for (const StepLog& log : logs) {
        for (std::size_t i = 0; i < log.events.included_ids.size(); ++i) {
            const long id = log.events.included_ids[i];
            const LandmarkSnap* snap = nullptr;
            for (const LandmarkSnap& lm : log.landmarks) {
                if (lm.id == id) {
                    snap = &lm;
                }
            }
            if (snap == nullptr) {
                continue;  // merged away in the same step
            }
            bool on_vehicle = false;
            for (const VehicleTruth& vehicle : scene.vehicles) {
                if (vehicle.present_at(log.k) &&
                    rectangle_distance(vehicle, {snap->px, snap->py}) <= radius) {
                    on_vehicle = true;
                    break;
                }
            }
            if (on_vehicle) {
                continue;
            }
            const int k_removed = removal_step_of(logs, id, log.k);
            if (k_removed >= 0) {
                out.false_removal.push_back(k_removed - log.k);
            }
        }
    }

    return out;
}

RunMetrics compute_run_metrics(const std::vector<StepLog>& logs, const Scene& scene,
                               double radius) {
    RunMetrics out;
    const PoseErrors pe = pose_errors(logs);
    out.position_rmse = pe.position_rmse;
    out.heading_rmse_deg = pe.heading_rmse_deg;

    if (!logs.empty()) {
        const StepLog& last = logs.back();
        const std::vector<int> eligible = mappable_vehicles(logs, scene);
        std::vector<VehicleTruth> vehicles;
        for (int v : eligible) {
            vehicles.push_back(scene.vehicles[v]);
        }
        const MatchResult match = landmark_matching(last.landmarks, vehicles, radius);
        out.false_landmarks = static_cast<int>(match.false_landmarks.size());
        out.missed_landmarks = static_cast<int>(match.missed_vehicles.size());

        if (!match.pairs.empty()) {
            double sum = 0.0;
            for (const auto& [l, v] : match.pairs) {
                const Eigen::Vector2d p(last.landmarks[l].px, last.landmarks[l].py);
                sum += (p - vehicles[v].center).norm();
            }
            out.landmark_mae = sum / static_cast<double>(match.pairs.size());
        } else {
            out.landmark_mae = std::numeric_limits<double>::quiet_NaN();
        }
    }

    const DelaySamples d = delays(logs, scene, radius);
    out.inclusion_delays = d.inclusion;
    out.removal_delays = d.departed_removal;
    out.removal_delays.insert(out.removal_delays.end(), d.false_removal.begin(),
                              d.false_removal.end());
    return out;
}

AggregateMetrics aggregate_metrics(const std::vector<RunMetrics>& runs) {
    AggregateMetrics agg;
    agg.runs = static_cast<int>(runs.size());
    if (runs.empty()) {
        return agg;
    }

    std::vector<double> pos, heading, mae, incl, rem, false_counts, missed_counts;
    for (const RunMetrics& r : runs) {
        pos.push_back(r.position_rmse);
        heading.push_back(r.heading_rmse_deg);
        if (!std::isnan(r.landmark_mae)) {
            mae.push_back(r.landmark_mae);
        }
        for (int v : r.inclusion_delays) {
            incl.push_back(static_cast<double>(v));
        }
        for (int v : r.removal_delays) {
            rem.push_back(static_cast<double>(v));
        }
        false_counts.push_back(static_cast<double>(r.false_landmarks));
        missed_counts.push_back(static_cast<double>(r.missed_landmarks));
        agg.max_false = std::max(agg.max_false, r.false_landmarks);
        agg.max_missed = std::max(agg.max_missed, r.missed_landmarks);
    }
    agg.position_rmse = sorted_mean(std::move(pos));
    agg.heading_rmse_deg = sorted_mean(std::move(heading));
    agg.landmark_mae = sorted_mean(std::move(mae));
    agg.inclusion_mean_delay = sorted_mean(std::move(incl));
    agg.removal_mean_delay = sorted_mean(std::move(rem));
    agg.mean_false = sorted_mean(std::move(false_counts));
    agg.mean_missed = sorted_mean(std::move(missed_counts));
    return agg;
}

MonteCarloResult monte_carlo(const Scenario& scenario, int runs) {
    std::vector<std::uint64_t> seeds = scenario.seeds;
    for (std::uint64_t s = 1; static_cast<int>(seeds.size()) < runs; ++s) {
        if (std::find(seeds.begin(), seeds.end(), s) == seeds.end()) {
            seeds.push_back(s);
        }
    }
    seeds.resize(static_cast<std::size_t>(runs));

    std::vector<RunMetrics> metrics(static_cast<std::size_t>(runs));
    // not vector<bool>: adjacent flags must be independently writable
    std::vector<unsigned char> completed(static_cast<std::size_t>(runs), 0);

    const unsigned workers = std::max(1u, std::thread::hardware_concurrency());
    std::vector<std::future<void>> futures;
    futures.reserve(workers);
    std::atomic<int> next{0};
    for (unsigned w = 0; w < workers; ++w) {
        futures.push_back(std::async(std::launch::async, [&]() {
            while (true) {
                const int i = next.fetch_add(1);
                if (i >= runs) {
                    return;
                }
                const RunResult run = run_scenario(scenario, seeds[i]);
                if (!run.aborted) {
                    metrics[i] = compute_run_metrics(run.logs, scenario.scene);
                    completed[i] = 1;
                }
            }
        }));
    }
    for (auto& f : futures) {
        f.get();
    }

    MonteCarloResult result;
    for (int i = 0; i < runs; ++i) {
        if (completed[i] != 0) {
            result.per_run.push_back(std::move(metrics[i]));
        } else {
            ++result.aborted_runs;
        }
    }
    result.aggregate = aggregate_metrics(result.per_run);
    return result;
}

}  // namespace radar_slam
