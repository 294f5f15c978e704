#pragma once

#include <cmath>
#include <numbers>

namespace tripod {

inline constexpr double pi = std::numbers::pi;
inline constexpr double two_pi = 2.0 * std::numbers::pi;

// Wrap an angle to the canonical interval [0, 2*pi).
inline double wrap_angle(double a) {
    double w = std::fmod(a, two_pi);
    if (w < 0.0) w += two_pi;
    if (w >= two_pi) w = 0.0;  // fmod rounding at the seam
    return w;
}

// Signed distance between two angles, in (-pi, pi].
inline double angle_difference(double a, double b) {
    double d = std::remainder(a - b, two_pi);
    if (d <= -pi) d += two_pi;
    return d;
}

}  // namespace tripod
