#pragma once

#include <stdexcept>
#include <string>

namespace radar_slam {

/// Dimension or index mismatch in a state edit.
struct StructuralError : std::runtime_error {
    using std::runtime_error::runtime_error;
};

/// Covariance left the numerically healthy region (non-PSD input,
/// ill-conditioned innovation, trace blow-up).
struct NumericalStateError : std::runtime_error {
    using std::runtime_error::runtime_error;
};

/// Measurement geometry too close to a singularity (zero range).
struct DegenerateGeometryError : std::runtime_error {
    using std::runtime_error::runtime_error;
};

/// Scenario text could not be parsed; carries the offending 1-based line.
struct ParseError : std::runtime_error {
    ParseError(const std::string& msg, int line_number)
        : std::runtime_error("line " + std::to_string(line_number) + ": " + msg),
          line(line_number) {}
    int line;
};

/// Scenario parsed but a field failed validation; carries the field name.
struct ValidationError : std::runtime_error {
    ValidationError(const std::string& field_name, const std::string& msg)
        : std::runtime_error(field_name + ": " + msg), field(field_name) {}
    std::string field;
};

}  // namespace radar_slam
