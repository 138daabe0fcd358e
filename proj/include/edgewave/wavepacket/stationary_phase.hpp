#pragma once

#include <cmath>
#include <optional>
#include <vector>

#include "edgewave/eikonal/phase.hpp"
#include "edgewave/spectral/profile.hpp"
#include "edgewave/wavepacket/ansatz.hpp"

namespace edgewave {

struct StationaryPhaseValue {
  bool negligible = false;  ///< no stationary point in Ξ: field is O(ε^∞) there
  double xi_star = 0.0;
  double hessian = 0.0;
  Spinor value{0.0, 0.0};
};

/// One-term stationary-phase value of the ansatz at (t, x̃, ỹ):
/// ε^{−1/4} (2π/|∂²_ξG|)^{1/2} e^{iG*/√ε + iπ sgn(∂²_ξG)/4} f(ξ*) Ψ_{ξ*}(ỹ/√ε).
/// ∂²_ξG already contains the factor t.
inline StationaryPhaseValue stationary_phase_eval(const WavepacketSpec& spec, double t, double x, double yt,
                                                  double t_min_factor = 10.0) {
  spec.validate();
  const double se = std::sqrt(spec.epsilon());
  if (std::abs(t) < t_min_factor * se)
    fail(ErrorCode::OutsideValidity, "stationary phase needs |t| >= 10 sqrt(eps)", {t});
  const PhaseSolution& ph = *spec.phase;
  StationaryPhaseValue out;
  const auto root = stationary_point(ph, t, x);
  if (!root) {
    out.negligible = true;
    return out;
  }
  const double xi = *root;
  const double g2 = phase_hessian(ph, t, x, xi);
  const PhaseDerivs d = ph.eval(t, x, xi);
  const double amp = std::pow(spec.epsilon(), -0.25) * std::sqrt(2.0 * pi / std::abs(g2)) * spec.envelope(xi);
  const cplx ph_factor = std::polar(amp, d.G / se + 0.25 * pi * (g2 > 0 ? 1.0 : -1.0));
  const double mu = ph.slope(x);
  const TransverseProfile prof(spec.branch, ph.k(x, xi), mu);
  const auto c = prof.components(yt / se);
  out.xi_star = xi;
  out.hessian = g2;
  out.value = {ph_factor * c[0], ph_factor * c[1]};
  return out;
}

/// max over the rectified grid of |v(t)| for each t (flat Jacobian).
inline std::vector<std::pair<double, double>> max_amplitude_decay(const WavepacketSpec& spec,
                                                                  const std::vector<double>& times,
                                                                  const std::vector<double>& xs,
                                                                  const std::vector<double>& ys,
                                                                  const AssemblyOptions& opt = {}) {
  std::vector<std::pair<double, double>> out;
  for (double t : times) {
    const LongitudinalTable tab = assemble_longitudinal(spec, t, xs, opt);
    double m = 0.0;
    for (std::size_t i = 0; i < tab.xs.size(); ++i)
      for (double y : ys) {
        const Spinor v = tab.at_node(i, y);
        m = std::max(m, std::sqrt(norm2(v)));
      }
    out.emplace_back(t, m);
  }
  return out;
}

}  // namespace edgewave
