#pragma once

#include <cmath>
#include <numbers>

namespace uuvsim {

/// Maps an angle to (-pi, pi].
inline double wrap_angle(double angle)
{
    double w = std::remainder(angle, 2.0 * std::numbers::pi);
    if (w <= -std::numbers::pi) {
        w += 2.0 * std::numbers::pi;
    }
    return w;
}

/// Wrap-aware difference a - b, in (-pi, pi].
inline double angle_diff(double a, double b) { return wrap_angle(a - b); }

inline double deg2rad(double deg) { return deg * std::numbers::pi / 180.0; }

}  // namespace uuvsim
