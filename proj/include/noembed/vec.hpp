#pragma once
#include <cmath>
#include <stdexcept>
#include <string>

namespace noembed {

struct Vec2 {
    double x{0.0};
    double y{0.0};

    Vec2 operator+(Vec2 o) const { return {x + o.x, y + o.y}; }
    Vec2 operator-(Vec2 o) const { return {x - o.x, y - o.y}; }
    Vec2 operator*(double s) const { return {x * s, y * s}; }
    Vec2 operator/(double s) const { return {x / s, y / s}; }
    Vec2 operator-() const { return {-x, -y}; }
    Vec2& operator+=(Vec2 o) { x += o.x; y += o.y; return *this; }
    bool operator==(const Vec2&) const = default;
};

inline Vec2 operator*(double s, Vec2 v) { return v * s; }
inline double dot(Vec2 a, Vec2 b) { return a.x * b.x + a.y * b.y; }
inline double cross(Vec2 a, Vec2 b) { return a.x * b.y - a.y * b.x; }
inline double norm(Vec2 a) { return std::hypot(a.x, a.y); }
inline Vec2 normalized(Vec2 a) { return a / norm(a); }
inline Vec2 rotate(Vec2 a, double ang)
{
    const double c = std::cos(ang), s = std::sin(ang);
    return {c * a.x - s * a.y, s * a.x + c * a.y};
}
/// Counter-clockwise perpendicular.
inline Vec2 perp(Vec2 a) { return {-a.y, a.x}; }

// Error kinds shared by every module.
struct DomainError : std::invalid_argument {
    using std::invalid_argument::invalid_argument;
};
struct ConvergenceError : std::runtime_error {
    using std::runtime_error::runtime_error;
};
struct ResolutionError : std::runtime_error {
    using std::runtime_error::runtime_error;
};
struct HypothesisError : std::runtime_error {
    using std::runtime_error::runtime_error;
};

} // namespace noembed
