#pragma once

#include <cmath>
#include <string>

#include "edgewave/core/error.hpp"
#include "edgewave/core/quadrature.hpp"
#include "edgewave/core/types.hpp"
#include "edgewave/eikonal/phase.hpp"

namespace edgewave {

/// Wavenumber envelope f(ξ) of an ansatz superposition.
class Envelope {
 public:
  enum class Kind { Gaussian, Bump };

  /// f = N e^{−(ξ−ξc)²/(2σ²)}, with window ξc ± 8.5σ where f < 1e−14·max f.
  static Envelope gaussian(double center, double sigma, bool normalized = true) {
    if (!(sigma > 0.0)) fail(ErrorCode::ConfigError, "envelope.sigma must be positive");
    Envelope e(Kind::Gaussian, center, sigma, center - 8.5 * sigma, center + 8.5 * sigma);
    e.scale_ = normalized ? std::pow(pi * sigma * sigma, -0.25) : 1.0;
    e.normalized_ = normalized;
    return e;
  }

  /// f = N exp(−1/(1−s²)) with s mapping [lo, hi] to [−1, 1]; compact support.
  static Envelope bump(double lo, double hi, bool normalized = true) {
    if (!(hi > lo)) fail(ErrorCode::ConfigError, "envelope bump needs xi_max > xi_min");
    Envelope e(Kind::Bump, 0.5 * (lo + hi), 0.5 * (hi - lo), lo, hi);
    if (normalized) {
      const double n2 = quad::adaptive([&](double x) { return e.raw(x) * e.raw(x); }, lo, hi, 1e-15);
      e.scale_ = 1.0 / std::sqrt(n2);
    }
    e.normalized_ = normalized;
    return e;
  }

  Kind kind() const { return kind_; }
  double center() const { return center_; }
  /// σ for Gaussians, half-width for bumps.
  double width() const { return width_; }
  bool normalized() const { return normalized_; }
  Interval window() const { return {lo_, hi_}; }
  Support support() const { return Support::interval(lo_, hi_); }

  double operator()(double xi) const { return scale_ * raw(xi); }

  std::string describe() const {
    return kind_ == Kind::Gaussian ? "gaussian(" + std::to_string(center_) + "," + std::to_string(width_) + ")"
                                   : "bump(" + std::to_string(lo_) + "," + std::to_string(hi_) + ")";
  }

 private:
  Envelope(Kind k, double c, double w, double lo, double hi) : kind_(k), center_(c), width_(w), lo_(lo), hi_(hi) {}

  double raw(double xi) const {
    if (kind_ == Kind::Gaussian) {
      const double d = (xi - center_) / width_;
      return std::exp(-0.5 * d * d);
    }
    const double s = (xi - center_) / width_;
    if (!(std::abs(s) < 1.0)) return 0.0;
    return std::exp(-1.0 / (1.0 - s * s));
  }

  Kind kind_;
  double center_, width_, lo_, hi_;
  double scale_ = 1.0;
  bool normalized_ = false;
};

/// Real-space longitudinal shape f̌(X) for relativistic modes, unit L²(dX):
/// f̌ = (πw²)^{−1/4} e^{−X²/(2w²)} e^{iξc X}.
struct LongitudinalProfile {
  double width = 1.0;
  double carrier = 0.0;

  cplx operator()(double X) const {
    const double a = std::pow(pi * width * width, -0.25) * std::exp(-0.5 * X * X / (width * width));
    return a * std::exp(cplx(0.0, carrier * X));
  }
  cplx derivative(double X) const { return (cplx(-X / (width * width), carrier)) * (*this)(X); }
};

}  // namespace edgewave
