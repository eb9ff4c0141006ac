#pragma once

#include <cmath>

namespace radar_slam {

/// Wraps an angle to (-pi, pi], congruent to the input mod 2*pi.
inline double wrap_angle(double a) {
    double w = std::remainder(a, 2.0 * M_PI);  // lands in [-pi, pi]
    if (w <= -M_PI) {
        w = M_PI;
    }
    return w;
}

inline double deg_to_rad(double d) { return d * M_PI / 180.0; }
inline double rad_to_deg(double r) { return r * 180.0 / M_PI; }

}  // namespace radar_slam
