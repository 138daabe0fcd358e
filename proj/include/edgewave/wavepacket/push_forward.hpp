#pragma once

#include <cmath>
#include <optional>

#include "edgewave/core/parallel.hpp"
#include "edgewave/geometry/rectification.hpp"
#include "edgewave/wavepacket/field.hpp"

namespace edgewave {

/// C^∞ cutoff: 1 for |r| ≤ 1, 0 for |r| ≥ 2.
inline double tube_cutoff(double r) {
  r = std::abs(r);
  if (r <= 1.0) return 1.0;
  if (r >= 2.0) return 0.0;
  auto psi = [](double s) { return s > 0.0 ? std::exp(-1.0 / s) : 0.0; };
  const double a = psi(2.0 - r), b = psi(r - 1.0);
  return a / (a + b);
}

struct PushForwardOptions {
  /// For closed Γ, x̃ is taken in [center − L/2, center + L/2).
  double window_center = 0.0;
  /// Rotate Dirac spinors from the (τ, ν) frame: u = diag(e^{−iθ/2}, e^{iθ/2}) w.
  bool rotate_spinor = true;
  int components = 2;
  double time = 0.0;
  double epsilon = 0.0;
};

/// u(x, y) = χ(ỹ/η) v(Φ⁻¹(x, y)) on the grid, zero outside the tube.
/// `v(x̃, ỹ)` returns a Spinor (KG uses component 0).
template <class Sampler>
Field push_forward(const RectificationMap& map, const Sampler& v, const Grid& grid, const PushForwardOptions& opt) {
  Field out(grid, opt.components, opt.time, opt.epsilon);
  const LevelCurve& c = map.curve();
  const double L = c.closed() ? c.total_length() : 0.0;
  parallel_for(0, grid.ny, [&](std::size_t iy) {
    for (std::size_t ix = 0; ix < grid.nx; ++ix) {
      const auto tc = map.try_inverse({grid.x(ix), grid.y(iy)});
      if (!tc) continue;
      const double chi = tube_cutoff(tc->yt / map.eta());
      if (chi == 0.0) continue;
      double s = tc->s;
      if (c.closed()) s -= L * std::floor((s - (opt.window_center - 0.5 * L)) / L);
      Spinor w = v(s, tc->yt);
      if (opt.components == 2 && opt.rotate_spinor) {
        const double th = c.frame_angle(s);
        w[0] *= std::polar(1.0, -0.5 * th);
        w[1] *= std::polar(1.0, 0.5 * th);
      }
      for (int k = 0; k < opt.components; ++k) out.at(k, ix, iy) = chi * w[k];
    }
  });
  return out;
}

}  // namespace edgewave
