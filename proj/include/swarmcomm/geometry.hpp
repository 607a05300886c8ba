#pragma once
/**
 * @file geometry.hpp
 * @brief 2D vector and circle primitives shared by every simulation module.
 *
 * Units are pixels and radians throughout. All operations are constexpr or
 * inline and allocation-free.
 */

#include <cmath>
#include <numbers>

namespace swarmcomm {

struct Vec2 {
  double x{0.0};
  double y{0.0};

  constexpr Vec2() = default;
  constexpr Vec2(double x_, double y_) : x(x_), y(y_) {}

  constexpr Vec2 operator+(const Vec2& r) const { return {x + r.x, y + r.y}; }
  constexpr Vec2 operator-(const Vec2& r) const { return {x - r.x, y - r.y}; }
  constexpr Vec2 operator-() const { return {-x, -y}; }
  constexpr Vec2 operator*(double s) const { return {x * s, y * s}; }
  constexpr Vec2 operator/(double s) const { return {x / s, y / s}; }
  constexpr Vec2& operator+=(const Vec2& r) { x += r.x; y += r.y; return *this; }
  constexpr Vec2& operator-=(const Vec2& r) { x -= r.x; y -= r.y; return *this; }
  constexpr bool operator==(const Vec2&) const = default;

  constexpr double dot(const Vec2& r) const { return x * r.x + y * r.y; }
  constexpr double cross(const Vec2& r) const { return x * r.y - y * r.x; }
  constexpr double norm2() const { return x * x + y * y; }
  double norm() const { return std::sqrt(x * x + y * y); }
  bool is_finite() const { return std::isfinite(x) && std::isfinite(y); }
};

constexpr Vec2 operator*(double s, const Vec2& v) { return v * s; }

/// Magnitudes at or below this are treated as the zero vector.
inline constexpr double kZeroForce = 1e-12;

/// Unit vector along `v`, or the zero vector when `v` is (numerically) zero.
inline Vec2 unit(const Vec2& v) {
  const double n = v.norm();
  if (n <= kZeroForce) return {};
  return v / n;
}

inline Vec2 heading_vector(double heading) { return {std::cos(heading), std::sin(heading)}; }

inline Vec2 rotate(const Vec2& v, double angle) {
  const double c = std::cos(angle), s = std::sin(angle);
  return {c * v.x - s * v.y, s * v.x + c * v.y};
}

/// Maps an angle into (-pi, pi].
inline double wrap_angle(double a) {
  constexpr double pi = std::numbers::pi;
  constexpr double two_pi = 2.0 * std::numbers::pi;
  if (a > -pi && a <= pi) return a;
  a = std::fmod(a, two_pi);
  if (a <= -pi) a += two_pi;
  if (a > pi) a -= two_pi;
  return a;
}

inline double distance(const Vec2& a, const Vec2& b) { return (b - a).norm(); }
inline constexpr double distance2(const Vec2& a, const Vec2& b) { return (b - a).norm2(); }

struct Circle {
  Vec2 center;
  double radius{1.0};
};

/// True when the open disc of radius `r` at `c` meets the segment [a, b].
/// A disc whose boundary only touches the segment does not count.
inline bool disc_blocks_segment(const Vec2& a, const Vec2& b, const Vec2& c, double r) {
  const Vec2 ab = b - a;
  const double len2 = ab.norm2();
  double t = len2 > 0.0 ? (c - a).dot(ab) / len2 : 0.0;
  if (t < 0.0) t = 0.0;
  if (t > 1.0) t = 1.0;
  const Vec2 closest = a + ab * t;
  return distance2(closest, c) < r * r;
}

}  // namespace swarmcomm
