#pragma once

#include <array>
#include <cmath>

#include "edgewave/core/types.hpp"
#include "edgewave/spectral/branches.hpp"
#include "edgewave/spectral/hermite.hpp"

namespace edgewave {

/// Leading-order transverse profile of branch (m, s) at wavenumber ξ on a wall
/// of slope μ, as a function of z = ỹ/√ε. Unit norm in L²(dz).
///
/// Dirac: lower·φ_{m−1}(√μ z)μ^{1/4} + upper·φ_m(√μ z)μ^{1/4} with constant
/// spinors `lower`, `upper`. KG: φ_m(√μ z)μ^{1/4}.
class TransverseProfile {
 public:
  TransverseProfile(const BranchSpec& branch, double xi, double mu) : branch_(branch), xi_(xi), mu_(mu) {
    require_slope(mu);
    const double r = 1.0 / std::sqrt(2.0);
    if (branch.model() == Model::KleinGordon) return;
    if (branch.m() == 0) {
      upper_ = {r, -r};
      return;
    }
    const double e = dispersion(branch, xi, mu);
    // eigenvector (α, β) of [[ξ, √(2mμ)], [√(2mμ), −ξ]]; pivot on the larger
    // component so the formula stays well conditioned for large |ξ|
    const double w = std::sqrt(2.0 * branch.m() * mu);
    double alpha = 1.0, beta = (e - xi) / w;
    if (std::abs(beta) > 1.0) {
      beta = 1.0;
      alpha = (e + xi) / w;
    }
    const double n = std::copysign(std::hypot(alpha, beta), alpha);  // keeps α > 0, smooth in ξ
    alpha /= n;
    beta /= n;
    lower_ = {alpha * r, alpha * r};
    upper_ = {beta * r, -beta * r};
  }

  const BranchSpec& branch() const { return branch_; }
  double xi() const { return xi_; }
  double mu() const { return mu_; }
  bool spinor() const { return branch_.model() == Model::Dirac; }
  const std::array<double, 2>& lower() const { return lower_; }
  const std::array<double, 2>& upper() const { return upper_; }

  /// Normalization constant μ^{1/4} of the scaled Hermite functions.
  double normalization() const { return std::pow(mu_, 0.25); }

  /// Scalar profile (KG).
  double scalar(double z) const {
    return normalization() * hermite(branch_.m(), std::sqrt(mu_) * z);
  }

  /// Spinor profile (Dirac); for KG the scalar sits in the first component.
  std::array<double, 2> components(double z) const {
    if (!spinor()) return {scalar(z), 0.0};
    const int m = branch_.m();
    const double c = normalization();
    const double zp = std::sqrt(mu_) * z;
    if (m == 0) {
      const double p = c * hermite(0, zp);
      return {upper_[0] * p, upper_[1] * p};
    }
    const auto phi = hermite_all(m, zp);
    const double lo = c * phi[m - 1], hi = c * phi[m];
    return {lower_[0] * lo + upper_[0] * hi, lower_[1] * lo + upper_[1] * hi};
  }

  Spinor value(double z) const {
    const auto v = components(z);
    return {cplx(v[0]), cplx(v[1])};
  }

 private:
  BranchSpec branch_;
  double xi_;
  double mu_;
  std::array<double, 2> lower_{0.0, 0.0};
  std::array<double, 2> upper_{0.0, 0.0};
};

inline TransverseProfile transverse_profile(const ModelSpec& model, const BranchSpec& branch, double xi, double mu) {
  if (model.model != branch.model()) fail(ErrorCode::InvalidBranch, "branch belongs to a different model");
  return TransverseProfile(branch, xi, mu);
}

}  // namespace edgewave
