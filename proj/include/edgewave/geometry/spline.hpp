#pragma once

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <vector>

#include "edgewave/core/error.hpp"
#include "edgewave/core/types.hpp"

namespace edgewave {

/// Index i with knots[i] <= s < knots[i+1], clamped to the valid range.
inline std::size_t locate_interval(const std::vector<double>& knots, double s) {
  if (s <= knots.front()) return 0;
  if (s >= knots.back()) return knots.size() - 2;
  auto it = std::upper_bound(knots.begin(), knots.end(), s);
  return static_cast<std::size_t>(it - knots.begin()) - 1;
}

/// Interpolating cubic spline on non-uniform knots. Natural end conditions for
/// open data, periodic conditions when the last knot closes the period (the last
/// value must then equal the first).
class CubicSpline {
 public:
  CubicSpline() = default;

  CubicSpline(std::vector<double> knots, std::vector<double> values, bool periodic)
      : x_(std::move(knots)), y_(std::move(values)), periodic_(periodic) {
    const std::size_t n = x_.size();
    if (n < 3 || y_.size() != n) fail(ErrorCode::OutOfRange, "spline needs >= 3 knots");
    m_.assign(n, 0.0);
    if (periodic_) solve_periodic();
    else solve_natural();
  }

  double operator()(double s) const {
    const std::size_t i = locate_interval(x_, s);
    const double h = x_[i + 1] - x_[i];
    const double a = (x_[i + 1] - s) / h, b = (s - x_[i]) / h;
    return a * y_[i] + b * y_[i + 1] +
           ((a * a * a - a) * m_[i] + (b * b * b - b) * m_[i + 1]) * h * h / 6.0;
  }

  double derivative(double s) const {
    const std::size_t i = locate_interval(x_, s);
    const double h = x_[i + 1] - x_[i];
    const double a = (x_[i + 1] - s) / h, b = (s - x_[i]) / h;
    return (y_[i + 1] - y_[i]) / h +
           (-(3 * a * a - 1) * m_[i] + (3 * b * b - 1) * m_[i + 1]) * h / 6.0;
  }

  const std::vector<double>& knots() const { return x_; }

 private:
  // Second derivatives m satisfy h_{i-1} m_{i-1} + 2(h_{i-1}+h_i) m_i + h_i m_{i+1} = r_i.
  void solve_natural() {
    const std::size_t n = x_.size();
    std::vector<double> a(n, 0.0), b(n, 1.0), c(n, 0.0), r(n, 0.0);
    for (std::size_t i = 1; i + 1 < n; ++i) {
      const double h0 = x_[i] - x_[i - 1], h1 = x_[i + 1] - x_[i];
      a[i] = h0;
      b[i] = 2 * (h0 + h1);
      c[i] = h1;
      r[i] = 6 * ((y_[i + 1] - y_[i]) / h1 - (y_[i] - y_[i - 1]) / h0);
    }
    thomas(a, b, c, r);
    m_ = r;
  }

  void solve_periodic() {
    // Unknowns m_0..m_{n-2}; m_{n-1} = m_0.
    const std::size_t n = x_.size() - 1;
    auto h = [&](std::size_t i) { return x_[i + 1] - x_[i]; };
    std::vector<double> a(n), b(n), c(n), r(n);
    for (std::size_t i = 0; i < n; ++i) {
      const std::size_t im = (i + n - 1) % n;
      const double h0 = h(im), h1 = h(i);
      a[i] = h0;
      b[i] = 2 * (h0 + h1);
      c[i] = h1;
      const double yp = y_[i + 1], y0 = y_[i];
      const double ym = (i == 0) ? y_[n - 1] : y_[i - 1];
      r[i] = 6 * ((yp - y0) / h1 - (y0 - ym) / h0);
    }
    // Sherman-Morrison for the cyclic corner entries a[0] and c[n-1].
    const double gamma = -b[0];
    std::vector<double> bb = b, u(n, 0.0);
    bb[0] -= gamma;
    bb[n - 1] -= c[n - 1] * a[0] / gamma;
    u[0] = gamma;
    u[n - 1] = c[n - 1];
    std::vector<double> aa = a, cc = c;
    aa[0] = 0.0;
    cc[n - 1] = 0.0;
    std::vector<double> xs = r, zs = u;
    thomas(aa, bb, cc, xs);
    thomas(aa, bb, cc, zs);
    const double fact = (xs[0] + a[0] * xs[n - 1] / gamma) / (1.0 + zs[0] + a[0] * zs[n - 1] / gamma);
    for (std::size_t i = 0; i < n; ++i) m_[i] = xs[i] - fact * zs[i];
    m_[n] = m_[0];
  }

  static void thomas(std::vector<double> a, std::vector<double> b, std::vector<double> c,
                     std::vector<double>& r) {
    const std::size_t n = b.size();
    for (std::size_t i = 1; i < n; ++i) {
      const double w = a[i] / b[i - 1];
      b[i] -= w * c[i - 1];
      r[i] -= w * r[i - 1];
    }
    r[n - 1] /= b[n - 1];
    for (std::size_t i = n - 1; i-- > 0;) r[i] = (r[i] - c[i] * r[i + 1]) / b[i];
  }

  std::vector<double> x_, y_, m_;
  bool periodic_ = false;
};

/// C² piecewise quintic Hermite curve through points with prescribed first and
/// second derivatives with respect to the knot parameter.
class QuinticHermiteCurve {
 public:
  QuinticHermiteCurve() = default;
  QuinticHermiteCurve(std::vector<double> knots, std::vector<Vec2> p, std::vector<Vec2> d1,
                      std::vector<Vec2> d2)
      : s_(std::move(knots)), p_(std::move(p)), d1_(std::move(d1)), d2_(std::move(d2)) {}

  /// Derivative order 0, 1 or 2 at parameter s.
  Vec2 eval(double s, int order = 0) const {
    const std::size_t i = locate_interval(s_, s);
    const double h = s_[i + 1] - s_[i];
    const double u = (s - s_[i]) / h;
    double b[6];
    basis(u, order, b);
    const double scale = order == 0 ? 1.0 : (order == 1 ? 1.0 / h : 1.0 / (h * h));
    Vec2 r = b[0] * p_[i] + b[1] * p_[i + 1] + (h * b[2]) * d1_[i] + (h * b[3]) * d1_[i + 1] +
             (h * h * b[4]) * d2_[i] + (h * h * b[5]) * d2_[i + 1];
    return scale * r;
  }

  const std::vector<double>& knots() const { return s_; }

  /// Reference-interval basis (value, first or second derivative in u) ordered as
  /// p0, p1, d0, d1, a0, a1.
  static void basis(double u, int order, double* b) {
    const double u2 = u * u, u3 = u2 * u, u4 = u3 * u, u5 = u4 * u;
    if (order == 0) {
      b[0] = 1 - 10 * u3 + 15 * u4 - 6 * u5;
      b[1] = 10 * u3 - 15 * u4 + 6 * u5;
      b[2] = u - 6 * u3 + 8 * u4 - 3 * u5;
      b[3] = -4 * u3 + 7 * u4 - 3 * u5;
      b[4] = 0.5 * u2 - 1.5 * u3 + 1.5 * u4 - 0.5 * u5;
      b[5] = 0.5 * u3 - u4 + 0.5 * u5;
    } else if (order == 1) {
      b[0] = -30 * u2 + 60 * u3 - 30 * u4;
      b[1] = 30 * u2 - 60 * u3 + 30 * u4;
      b[2] = 1 - 18 * u2 + 32 * u3 - 15 * u4;
      b[3] = -12 * u2 + 28 * u3 - 15 * u4;
      b[4] = u - 4.5 * u2 + 6 * u3 - 2.5 * u4;
      b[5] = 1.5 * u2 - 4 * u3 + 2.5 * u4;
    } else {
      b[0] = -60 * u + 180 * u2 - 120 * u3;
      b[1] = 60 * u - 180 * u2 + 120 * u3;
      b[2] = -36 * u + 96 * u2 - 60 * u3;
      b[3] = -24 * u + 84 * u2 - 60 * u3;
      b[4] = 1 - 9 * u + 18 * u2 - 10 * u3;
      b[5] = 3 * u - 12 * u2 + 10 * u3;
    }
  }

 private:
  std::vector<double> s_;
  std::vector<Vec2> p_, d1_, d2_;
};

}  // namespace edgewave
