#pragma once

#include <array>
#include <cmath>
#include <complex>
#include <numbers>

namespace edgewave {

using cplx = std::complex<double>;

inline constexpr double pi = std::numbers::pi;
inline constexpr cplx I{0.0, 1.0};

struct Vec2 {
  double x = 0.0;
  double y = 0.0;

  constexpr Vec2& operator+=(Vec2 o) { x += o.x; y += o.y; return *this; }
  constexpr Vec2& operator-=(Vec2 o) { x -= o.x; y -= o.y; return *this; }
  constexpr Vec2& operator*=(double s) { x *= s; y *= s; return *this; }
  friend constexpr Vec2 operator+(Vec2 a, Vec2 b) { return {a.x + b.x, a.y + b.y}; }
  friend constexpr Vec2 operator-(Vec2 a, Vec2 b) { return {a.x - b.x, a.y - b.y}; }
  friend constexpr Vec2 operator-(Vec2 a) { return {-a.x, -a.y}; }
  friend constexpr Vec2 operator*(double s, Vec2 a) { return {s * a.x, s * a.y}; }
  friend constexpr Vec2 operator*(Vec2 a, double s) { return {s * a.x, s * a.y}; }
  friend constexpr Vec2 operator/(Vec2 a, double s) { return {a.x / s, a.y / s}; }
  friend constexpr bool operator==(Vec2, Vec2) = default;
};

using Point = Vec2;

constexpr double dot(Vec2 a, Vec2 b) { return a.x * b.x + a.y * b.y; }
constexpr double cross(Vec2 a, Vec2 b) { return a.x * b.y - a.y * b.x; }
inline double norm(Vec2 a) { return std::hypot(a.x, a.y); }
inline Vec2 normalized(Vec2 a) { return a / norm(a); }
/// Counter-clockwise rotation by 90 degrees.
constexpr Vec2 rot90(Vec2 a) { return {-a.y, a.x}; }
/// Clockwise rotation by 90 degrees.
constexpr Vec2 rot270(Vec2 a) { return {a.y, -a.x}; }

struct Rect {
  double x_min = -1.0;
  double x_max = 1.0;
  double y_min = -1.0;
  double y_max = 1.0;

  constexpr bool contains(Point p) const {
    return p.x >= x_min && p.x <= x_max && p.y >= y_min && p.y <= y_max;
  }
  constexpr double distance_to_boundary(Point p) const {
    double d = p.x - x_min;
    d = d < x_max - p.x ? d : x_max - p.x;
    d = d < p.y - y_min ? d : p.y - y_min;
    d = d < y_max - p.y ? d : y_max - p.y;
    return d;
  }
  friend constexpr bool operator==(const Rect&, const Rect&) = default;
};

/// Two-component complex value. Scalar (Klein-Gordon) fields use component 0 only.
using Spinor = std::array<cplx, 2>;

inline double norm2(const Spinor& s) { return std::norm(s[0]) + std::norm(s[1]); }

}  // namespace edgewave
