#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include <Eigen/Core>

#include "radar_slam/manager.hpp"
#include "radar_slam/simulator.hpp"

namespace radar_slam {

/// Full run configuration: world, manager thresholds, noise covariances and
/// seeds. Produced by the scenario parser; defaults follow the standard
/// parameter table, so a minimal file only needs [scene] and [trajectory].
struct Scenario {
    Scene scene;
    ManagerConfig manager;
    Eigen::Matrix2d R;  // measurement noise
    Eigen::Matrix3d Q;  // process noise (pose block)
    Eigen::Matrix2d U;  // odometry noise
    std::vector<std::uint64_t> seeds;

    Scenario();  // Table-defaults for everything except the world

    /// Throws ValidationError on inconsistent values.
    void validate() const;
};

/// Parses the scenario text format (sections of key/value lines plus row
/// tables; see README for the grammar). Throws ParseError with a line number
/// or ValidationError naming the field.
Scenario parse_scenario(const std::string& text);

/// Reads and parses a scenario file.
Scenario load_scenario(const std::string& path);

/// Serializes back to the text format with full double precision; parsing the
/// output reproduces the configuration exactly.
std::string serialize_scenario(const Scenario& scenario);

}  // namespace radar_slam
