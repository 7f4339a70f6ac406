#pragma once

#include <cmath>
#include <numbers>

namespace placenav {

inline constexpr double kPi = std::numbers::pi;
inline constexpr double kTwoPi = 2.0 * std::numbers::pi;

struct Vec2 {
    double x = 0.0;
    double y = 0.0;

    constexpr Vec2 operator+(Vec2 o) const { return {x + o.x, y + o.y}; }
    constexpr Vec2 operator-(Vec2 o) const { return {x - o.x, y - o.y}; }
    constexpr Vec2 operator*(double s) const { return {x * s, y * s}; }
    constexpr Vec2& operator+=(Vec2 o) { x += o.x; y += o.y; return *this; }
    constexpr bool operator==(const Vec2&) const = default;

    constexpr double dot(Vec2 o) const { return x * o.x + y * o.y; }
    constexpr double cross(Vec2 o) const { return x * o.y - y * o.x; }
    double norm() const { return std::hypot(x, y); }

    static Vec2 unit(double angle) { return {std::cos(angle), std::sin(angle)}; }
};

inline double distance(Vec2 a, Vec2 b) { return (a - b).norm(); }

// Wraps to (-pi, pi].
inline double wrap_pi(double a) {
    a = std::fmod(a, kTwoPi);
    if (a <= -kPi) a += kTwoPi;
    else if (a > kPi) a -= kTwoPi;
    return a;
}

// Wraps to [0, 2pi).
inline double wrap_2pi(double a) {
    a = std::fmod(a, kTwoPi);
    if (a < 0.0) a += kTwoPi;
    if (a >= kTwoPi) a -= kTwoPi;
    return a;
}

inline double deg2rad(double d) { return d * kPi / 180.0; }
inline double rad2deg(double r) { return r * 180.0 / kPi; }

}  // namespace placenav
