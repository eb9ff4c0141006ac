#pragma once

#include <string>
#include <vector>

#include "radar_slam/metrics.hpp"
#include "radar_slam/slam.hpp"

namespace radar_slam {

/// Serializes step logs as tab-separated text with one header line and one
/// record per step. Doubles are printed with full round-trip precision, so
/// identical runs produce byte-identical files.
std::string serialize_step_logs(const std::vector<StepLog>& logs);

/// Parses text produced by serialize_step_logs. Throws ParseError.
std::vector<StepLog> parse_step_logs(const std::string& text);

/// One plot-ready scene snapshot: poses, registry, the frame's detections in
/// global coordinates, and the truth rectangles.
struct Snapshot {
    int k = 0;
    Pose true_pose;
    Pose est_pose;
    std::vector<LandmarkSnap> landmarks;
    struct Detection {
        double gx = 0.0;
        double gy = 0.0;
        int origin = 0;
    };
    std::vector<Detection> detections;
    struct Vehicle {
        int id = 0;
        double cx = 0.0;
        double cy = 0.0;
        double length = 0.0;
        double width = 0.0;
        double orientation = 0.0;
        bool present = false;
    };
    std::vector<Vehicle> vehicles;
};

/// Builds the snapshot for step k of a finished run (detections are projected
/// through the true pose).
Snapshot make_snapshot(const StepLog& log, const FrameTruth& frame, const Scene& scene);

std::string serialize_snapshot(const Snapshot& snapshot);
Snapshot parse_snapshot(const std::string& text);

/// Renders the aggregate metrics as a two-column table (metric name, value).
std::string format_metrics_table(const AggregateMetrics& metrics, const std::string& title);

/// Reads a table produced by format_metrics_table (values at the printed
/// precision). Throws ParseError.
AggregateMetrics parse_metrics_table(const std::string& text);

}  // namespace radar_slam
