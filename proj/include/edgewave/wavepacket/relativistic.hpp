#pragma once

#include <cmath>
#include <memory>

#include "edgewave/core/error.hpp"
#include "edgewave/geometry/level_curve.hpp"
#include "edgewave/spectral/branches.hpp"
#include "edgewave/wavepacket/envelope.hpp"

namespace edgewave {

/// Closed-form m = 0 mode in tube coordinates, unit L² norm on a flat wall:
/// ε^{−1/4} f̌((x̃ − x̃_c(t))/√ε) · ε^{−1/4}(μ/π)^{1/4} e^{−μỹ²/(2ε)}, times
/// (1, −1)/√2 for Dirac. x̃_c = x0 − t for Dirac and x0 + s·t for KG.
class RelativisticMode {
 public:
  RelativisticMode(BranchSpec branch, std::shared_ptr<const LevelCurve> curve, LongitudinalProfile profile, double x0,
                   double epsilon)
      : branch_(branch), curve_(std::move(curve)), profile_(profile), x0_(x0), eps_(epsilon) {
    if (!branch_.relativistic()) fail(ErrorCode::InvalidBranch, "relativistic mode needs an m = 0 branch");
    if (!curve_) fail(ErrorCode::ConfigError, "relativistic mode needs a curve");
    if (!(epsilon > 0.0)) fail(ErrorCode::ConfigError, "epsilon must be positive");
  }

  double speed() const { return branch_.model() == Model::Dirac ? -1.0 : static_cast<double>(branch_.sign()); }
  double center(double t) const { return x0_ + speed() * t; }
  int components() const { return branch_.model() == Model::Dirac ? 2 : 1; }
  const BranchSpec& branch() const { return branch_; }
  double epsilon() const { return eps_; }

  /// Value at time t; with `time_derivative`, ε∂_t of it instead.
  Spinor value(double t, double s, double yt, bool time_derivative = false) const {
    const double se = std::sqrt(eps_);
    const double mu = curve_->slope(s);
    const double X = (s - center(t)) / se;
    const cplx longi = time_derivative ? -speed() * se * profile_.derivative(X) : profile_(X);
    const double trans = std::pow(mu / pi, 0.25) * std::exp(-0.5 * mu * yt * yt / eps_);
    const cplx a = longi * trans / se;
    if (components() == 1) return {a, 0.0};
    const double r = 1.0 / std::sqrt(2.0);
    return {a * r, -a * r};
  }

  /// Sampler bound to one time.
  struct At {
    const RelativisticMode* mode;
    double t;
    bool time_derivative = false;
    Spinor operator()(double s, double yt) const { return mode->value(t, s, yt, time_derivative); }
  };
  At at(double t, bool time_derivative = false) const { return {this, t, time_derivative}; }

 private:
  BranchSpec branch_;
  std::shared_ptr<const LevelCurve> curve_;
  LongitudinalProfile profile_;
  double x0_;
  double eps_;
};

}  // namespace edgewave
