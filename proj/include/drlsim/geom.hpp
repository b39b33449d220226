#pragma once

#include <cmath>
#include <numbers>

namespace drlsim::geom {

inline constexpr double kPi = std::numbers::pi;
inline constexpr double kTwoPi = 2.0 * std::numbers::pi;

struct Vec2 {
    double x = 0.0;
    double y = 0.0;

    constexpr Vec2 operator+(Vec2 o) const { return {x + o.x, y + o.y}; }
    constexpr Vec2 operator-(Vec2 o) const { return {x - o.x, y - o.y}; }
    constexpr Vec2 operator*(double s) const { return {x * s, y * s}; }
    constexpr double dot(Vec2 o) const { return x * o.x + y * o.y; }
    constexpr double cross(Vec2 o) const { return x * o.y - y * o.x; }
    double norm() const { return std::hypot(x, y); }
    constexpr double squared_norm() const { return x * x + y * y; }
};

inline constexpr Vec2 operator*(double s, Vec2 v) { return {s * v.x, s * v.y}; }

inline double distance(Vec2 a, Vec2 b) { return (a - b).norm(); }

/// Unit vector pointing along `heading` radians.
inline Vec2 unit(double heading) { return {std::cos(heading), std::sin(heading)}; }

/// Rotate `v` by `angle` radians counter-clockwise.
inline Vec2 rotate(Vec2 v, double angle) {
    const double c = std::cos(angle), s = std::sin(angle);
    return {c * v.x - s * v.y, s * v.x + c * v.y};
}

/// Normalize an angle to (-pi, pi].
inline double wrap_angle(double a) {
    double r = std::fmod(a + kPi, kTwoPi);
    if (r <= 0.0) r += kTwoPi;
    return r - kPi;
}

/// Normalize an angle to [0, 2*pi).
inline double wrap_positive(double a) {
    double r = std::fmod(a, kTwoPi);
    if (r < 0.0) r += kTwoPi;
    return r;
}

}  // namespace drlsim::geom
