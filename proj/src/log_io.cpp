#include "radar_slam/log_io.hpp"

#include <cstdio>
#include <sstream>

#include "radar_slam/errors.hpp"

namespace radar_slam {

namespace {

std::string fmt(double v) {
    char buf[32];
    std::snprintf(buf, sizeof(buf), "%.17g", v);
    return buf;
}

std::vector<std::string> split(const std::string& s, char sep) {
    std::vector<std::string> out;
    std::string cur;
    for (char c : s) {
        if (c == sep) {
            out.push_back(cur);
            cur.clear();
        } else {
            cur += c;
        }
    }
    out.push_back(cur);
    return out;
}

double to_double(const std::string& tok, int line) {
    try {
        return std::stod(tok);
    } catch (const std::exception&) {
        throw ParseError("bad float '" + tok + "'", line);
    }
}

long to_long(const std::string& tok, int line) {
    try {
        return std::stol(tok);
    } catch (const std::exception&) {
        throw ParseError("bad integer '" + tok + "'", line);
    }
}

constexpr const char* kStepHeader =
    "k\ttrue_x\ttrue_y\ttrue_theta\test_x\test_y\test_theta\tn_landmarks\tn_det\tn_sift\t"
    "n_rem\tn_clusters\tn_noise\tn_assoc\tmax_trace_delta\tmin_eig\tlandmarks\tincluded\t"
    "removed\tmerged";

}  // namespace

std::string serialize_step_logs(const std::vector<StepLog>& logs) {
    std::ostringstream out;
    out << kStepHeader << '\n';
    for (const StepLog& log : logs) {
        out << log.k << '\t' << fmt(log.true_pose.x) << '\t' << fmt(log.true_pose.y) << '\t'
            << fmt(log.true_pose.theta) << '\t' << fmt(log.posterior_pose.x) << '\t'
            << fmt(log.posterior_pose.y) << '\t' << fmt(log.posterior_pose.theta) << '\t'
            << log.landmarks.size() << '\t' << log.n_detections << '\t' << log.n_sifted
            << '\t' << log.n_remainder << '\t' << log.n_clusters << '\t' << log.n_noise
            << '\t' << log.n_associations << '\t' << fmt(log.max_update_trace_delta) << '\t'
            << fmt(log.min_cov_eigenvalue) << '\t';

        if (log.landmarks.empty()) {
            out << '-';
        }
        for (std::size_t i = 0; i < log.landmarks.size(); ++i) {
            if (i > 0) out << ';';
            out << log.landmarks[i].id << ':' << fmt(log.landmarks[i].px) << ':'
                << fmt(log.landmarks[i].py);
        }
        out << '\t';

        if (log.events.included_ids.empty()) {
            out << '-';
        }
        for (std::size_t i = 0; i < log.events.included_ids.size(); ++i) {
            if (i > 0) out << ';';
            out << log.events.included_ids[i] << ':' << log.events.included_rules[i];
        }
        out << '\t';

        if (log.events.removed_ids.empty()) {
            out << '-';
        }
        for (std::size_t i = 0; i < log.events.removed_ids.size(); ++i) {
            if (i > 0) out << ';';
            out << log.events.removed_ids[i];
        }
        out << '\t';

        if (log.events.merged_pairs.empty()) {
            out << '-';
        }
        for (std::size_t i = 0; i < log.events.merged_pairs.size(); ++i) {
            if (i > 0) out << ';';
            out << log.events.merged_pairs[i].first << ':' << log.events.merged_pairs[i].second;
        }
        out << '\n';
    }
    return out.str();
}

std::vector<StepLog> parse_step_logs(const std::string& text) {
    std::istringstream stream(text);
    std::string line;
    int line_no = 0;
    std::vector<StepLog> out;
    while (std::getline(stream, line)) {
        ++line_no;
        if (line.empty()) {
            continue;
        }
        if (line_no == 1) {
            if (line != kStepHeader) {
                throw ParseError("unexpected step-log header", 1);
            }
            continue;
        }
        const std::vector<std::string> f = split(line, '\t');
        if (f.size() != 20) {
            throw ParseError("step record needs 20 fields", line_no);
        }
        StepLog log;
        log.k = static_cast<int>(to_long(f[0], line_no));
        log.true_pose = {to_double(f[1], line_no), to_double(f[2], line_no),
                         to_double(f[3], line_no)};
        log.posterior_pose = {to_double(f[4], line_no), to_double(f[5], line_no),
                              to_double(f[6], line_no)};
        log.n_detections = static_cast<int>(to_long(f[8], line_no));
        log.n_sifted = static_cast<int>(to_long(f[9], line_no));
        log.n_remainder = static_cast<int>(to_long(f[10], line_no));
        log.n_clusters = static_cast<int>(to_long(f[11], line_no));
        log.n_noise = static_cast<int>(to_long(f[12], line_no));
        log.n_associations = static_cast<int>(to_long(f[13], line_no));
        log.max_update_trace_delta = to_double(f[14], line_no);
        log.min_cov_eigenvalue = to_double(f[15], line_no);

        if (f[16] != "-") {
            for (const std::string& item : split(f[16], ';')) {
                const std::vector<std::string> parts = split(item, ':');
                if (parts.size() != 3) {
                    throw ParseError("bad landmark entry '" + item + "'", line_no);
                }
                log.landmarks.push_back({to_long(parts[0], line_no),
                                         to_double(parts[1], line_no),
                                         to_double(parts[2], line_no)});
            }
        }
        if (f[17] != "-") {
            for (const std::string& item : split(f[17], ';')) {
                const std::vector<std::string> parts = split(item, ':');
                if (parts.size() != 2) {
                    throw ParseError("bad inclusion entry '" + item + "'", line_no);
                }
                log.events.included_ids.push_back(to_long(parts[0], line_no));
                log.events.included_rules.push_back(
                    static_cast<int>(to_long(parts[1], line_no)));
            }
        }
        if (f[18] != "-") {
            for (const std::string& item : split(f[18], ';')) {
                log.events.removed_ids.push_back(to_long(item, line_no));
            }
        }
        if (f[19] != "-") {
            for (const std::string& item : split(f[19], ';')) {
                const std::vector<std::string> parts = split(item, ':');
                if (parts.size() != 2) {
                    throw ParseError("bad merge entry '" + item + "'", line_no);
                }
                log.events.merged_pairs.emplace_back(to_long(parts[0], line_no),
                                                     to_long(parts[1], line_no));
            }
        }
        const std::size_t n_landmarks = static_cast<std::size_t>(to_long(f[7], line_no));
        if (n_landmarks != log.landmarks.size()) {
            throw ParseError("landmark count disagrees with list", line_no);
        }
        out.push_back(std::move(log));
    }
    return out;
}

Snapshot make_snapshot(const StepLog& log, const FrameTruth& frame, const Scene& scene) {
    Snapshot snap;
    snap.k = log.k;
    snap.true_pose = log.true_pose;
    snap.est_pose = log.posterior_pose;
    snap.landmarks = log.landmarks;
    for (std::size_t i = 0; i < frame.detections.size(); ++i) {
        const RadarDetection& z = frame.detections[i];
        const Eigen::Vector2d g = project_detection(frame.true_pose, z.r, z.phi);
        snap.detections.push_back({g.x(), g.y(), frame.origins[i]});
    }
    for (const VehicleTruth& v : scene.vehicles) {
        snap.vehicles.push_back({v.id, v.center.x(), v.center.y(), v.length, v.width,
                                 v.orientation, v.present_at(log.k)});
    }
    return snap;
}

std::string serialize_snapshot(const Snapshot& snap) {
    std::ostringstream out;
    out << "record\tf1\tf2\tf3\tf4\tf5\tf6\tf7\n";
    out << "step\t" << snap.k << "\t-\t-\t-\t-\t-\t-\n";
    out << "pose_true\t" << fmt(snap.true_pose.x) << '\t' << fmt(snap.true_pose.y) << '\t'
        << fmt(snap.true_pose.theta) << "\t-\t-\t-\t-\n";
    out << "pose_est\t" << fmt(snap.est_pose.x) << '\t' << fmt(snap.est_pose.y) << '\t'
        << fmt(snap.est_pose.theta) << "\t-\t-\t-\t-\n";
    for (const LandmarkSnap& lm : snap.landmarks) {
        out << "landmark\t" << lm.id << '\t' << fmt(lm.px) << '\t' << fmt(lm.py)
            << "\t-\t-\t-\t-\n";
    }
    for (const Snapshot::Detection& d : snap.detections) {
        out << "detection\t" << fmt(d.gx) << '\t' << fmt(d.gy) << '\t' << d.origin
            << "\t-\t-\t-\t-\n";
    }
    for (const Snapshot::Vehicle& v : snap.vehicles) {
        out << "vehicle\t" << v.id << '\t' << fmt(v.cx) << '\t' << fmt(v.cy) << '\t'
            << fmt(v.length) << '\t' << fmt(v.width) << '\t' << fmt(v.orientation) << '\t'
            << (v.present ? 1 : 0) << '\n';
    }
    return out.str();
}

Snapshot parse_snapshot(const std::string& text) {
    std::istringstream stream(text);
    std::string line;
    int line_no = 0;
    Snapshot snap;
    while (std::getline(stream, line)) {
        ++line_no;
        if (line.empty() || line_no == 1) {
            continue;
        }
        const std::vector<std::string> f = split(line, '\t');
        if (f.size() != 8) {
            throw ParseError("snapshot record needs 8 fields", line_no);
        }
        if (f[0] == "step") {
            snap.k = static_cast<int>(to_long(f[1], line_no));
        } else if (f[0] == "pose_true") {
            snap.true_pose = {to_double(f[1], line_no), to_double(f[2], line_no),
                              to_double(f[3], line_no)};
        } else if (f[0] == "pose_est") {
            snap.est_pose = {to_double(f[1], line_no), to_double(f[2], line_no),
                             to_double(f[3], line_no)};
        } else if (f[0] == "landmark") {
            snap.landmarks.push_back({to_long(f[1], line_no), to_double(f[2], line_no),
                                      to_double(f[3], line_no)});
        } else if (f[0] == "detection") {
            snap.detections.push_back({to_double(f[1], line_no), to_double(f[2], line_no),
                                       static_cast<int>(to_long(f[3], line_no))});
        } else if (f[0] == "vehicle") {
            snap.vehicles.push_back({static_cast<int>(to_long(f[1], line_no)),
                                     to_double(f[2], line_no), to_double(f[3], line_no),
                                     to_double(f[4], line_no), to_double(f[5], line_no),
                                     to_double(f[6], line_no), to_long(f[7], line_no) != 0});
        } else {
            throw ParseError("unknown snapshot record '" + f[0] + "'", line_no);
        }
    }
    return snap;
}

AggregateMetrics parse_metrics_table(const std::string& text) {
    AggregateMetrics m;
    std::istringstream stream(text);
    std::string line;
    int line_no = 0;
    while (std::getline(stream, line)) {
        ++line_no;
        if (line.empty() || line_no == 1) {
            continue;
        }
        const std::vector<std::string> f = split(line, '\t');
        if (f.size() != 2) {
            throw ParseError("metrics row needs 2 fields", line_no);
        }
        const auto mean_max = [&](double& mean, int& max_out) {
            const std::size_t open = f[1].find('(');
            const std::size_t close = f[1].find(')');
            if (open == std::string::npos || close == std::string::npos) {
                throw ParseError("expected 'mean (max)' in '" + f[1] + "'", line_no);
            }
            mean = to_double(f[1].substr(0, open), line_no);
            max_out = static_cast<int>(
                to_long(f[1].substr(open + 1, close - open - 1), line_no));
        };
        if (f[0] == "platform_position_rmse_m") m.position_rmse = to_double(f[1], line_no);
        else if (f[0] == "platform_heading_rmse_deg") m.heading_rmse_deg = to_double(f[1], line_no);
        else if (f[0] == "landmark_mae_m") m.landmark_mae = to_double(f[1], line_no);
        else if (f[0] == "inclusion_mean_delay") m.inclusion_mean_delay = to_double(f[1], line_no);
        else if (f[0] == "removal_mean_delay") m.removal_mean_delay = to_double(f[1], line_no);
        else if (f[0] == "false_landmarks_mean_max") mean_max(m.mean_false, m.max_false);
        else if (f[0] == "missed_landmarks_mean_max") mean_max(m.mean_missed, m.max_missed);
        else throw ParseError("unknown metric '" + f[0] + "'", line_no);
    }
    return m;
}

std::string format_metrics_table(const AggregateMetrics& m, const std::string& title) {
    std::ostringstream out;
    char buf[128];
    out << "metric\t" << title << '\n';
    const auto row = [&](const char* name, double value) {
        std::snprintf(buf, sizeof(buf), "%s\t%.4f\n", name, value);
        out << buf;
    };
    row("platform_position_rmse_m", m.position_rmse);
    row("platform_heading_rmse_deg", m.heading_rmse_deg);
    row("landmark_mae_m", m.landmark_mae);
    row("inclusion_mean_delay", m.inclusion_mean_delay);
    row("removal_mean_delay", m.removal_mean_delay);
    std::snprintf(buf, sizeof(buf), "false_landmarks_mean_max\t%.4f (%d)\n", m.mean_false,
                  m.max_false);
    out << buf;
    std::snprintf(buf, sizeof(buf), "missed_landmarks_mean_max\t%.4f (%d)\n", m.mean_missed,
                  m.max_missed);
    out << buf;
    return out.str();
}

}  // namespace radar_slam
