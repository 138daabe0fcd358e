#pragma once

#include <cmath>
#include <memory>
#include <optional>
#include <vector>

#include "edgewave/core/quadrature.hpp"
#include "edgewave/geometry/domain_wall.hpp"
#include "edgewave/geometry/level_curve.hpp"
#include "edgewave/geometry/rectification.hpp"
#include "edgewave/harness/config.hpp"
#include "edgewave/pde/solvers.hpp"
#include "edgewave/wavepacket/ansatz.hpp"
#include "edgewave/wavepacket/push_forward.hpp"
#include "edgewave/wavepacket/relativistic.hpp"

namespace edgewave {

/// Wall and traced interface of one configuration.
struct Scene {
  DomainWall wall;
  std::shared_ptr<const LevelCurve> curve;

  static Scene build(const WallConfig& cfg) {
    Scene s;
    s.wall = cfg.build();
    s.curve = std::make_shared<const LevelCurve>(trace_level_set(s.wall, cfg.seed, cfg.step, cfg.max_length));
    return s;
  }

  RectificationMap map(std::optional<double> eta = std::nullopt) const {
    return RectificationMap(curve, eta, wall.bounds());
  }
};

/// Smallest even n' ≥ n whose only prime factors are 2, 3, 5 and 7.
inline std::size_t fft_size(std::size_t n) {
  n += n % 2;
  for (;; n += 2) {
    std::size_t k = n;
    for (std::size_t p : {2u, 3u, 5u, 7u})
      while (k % p == 0) k /= p;
    if (k == 1) return n;
  }
}

/// Periodic grid on `box` with spacing at most h and FFT-friendly node counts.
inline Grid fft_grid(const Rect& box, double h) {
  Grid g = Grid::covering(box, h);
  g.nx = fft_size(g.nx);
  g.ny = fft_size(g.ny);
  g.hx = (box.x_max - box.x_min) / static_cast<double>(g.nx);
  g.hy = (box.y_max - box.y_min) / static_cast<double>(g.ny);
  return g;
}

inline Rect padded(const Rect& r, double pad) { return {r.x_min - pad, r.x_max + pad, r.y_min - pad, r.y_max + pad}; }

/// Bounding box of Γ restricted to x̃ ∈ [lo, hi].
inline Rect curve_box(const LevelCurve& c, double lo, double hi) {
  Rect r{INFINITY, -INFINITY, INFINITY, -INFINITY};
  const int n = 400;
  for (int i = 0; i <= n; ++i) {
    const Point p = c.point(lo + (hi - lo) * i / n);
    r.x_min = std::min(r.x_min, p.x);
    r.x_max = std::max(r.x_max, p.x);
    r.y_min = std::min(r.y_min, p.y);
    r.y_max = std::max(r.y_max, p.y);
  }
  return r;
}

/// Uniform ξ lattice j·spacing inside [lo, hi] with equal weights. With
/// spacing 2π√ε/L_x the synthesized field is L_x-periodic in x̃.
inline quad::Rule lattice_rule(double lo, double hi, double spacing) {
  quad::Rule r;
  for (auto j = static_cast<long>(std::ceil(lo / spacing)); static_cast<double>(j) * spacing <= hi; ++j) {
    r.nodes.push_back(static_cast<double>(j) * spacing);
    r.weights.push_back(spacing);
  }
  return r;
}

inline Field relativistic_field(const RelativisticMode& mode, const RectificationMap& map, const Grid& grid, double t,
                                bool time_derivative = false, double window_center = 0.0) {
  PushForwardOptions opt;
  opt.components = mode.components();
  opt.time = t;
  opt.epsilon = mode.epsilon();
  opt.window_center = window_center;
  return push_forward(map, mode.at(t, time_derivative), grid, opt);
}

/// J = 0 packet of `spec` pushed forward onto `grid` at time t. The ansatz is
/// tabulated on uniform x̃ nodes (`nodes`, or spacing min(hx, hy) over the
/// window around `window_center` for closed Γ and the phase's valid range
/// otherwise) and interpolated by SeparableSampler.
inline Field dispersive_field(const WavepacketSpec& spec, const RectificationMap& map, const Grid& grid, double t,
                              const AssemblyOptions& opt = {}, double window_center = 0.0,
                              std::optional<std::vector<double>> nodes = std::nullopt) {
  std::vector<double> xs;
  if (nodes) {
    xs = *nodes;
  } else {
    const double h = std::min(grid.hx, grid.hy);
    const LevelCurve& c = map.curve();
    Interval range = spec.phase->valid_range();
    if (c.closed()) {
      const double half = 0.5 * c.total_length() + 4 * h;
      range = {std::max(range.lo, window_center - half), std::min(range.hi, window_center + half)};
    }
    const auto n = static_cast<std::size_t>(std::floor((range.hi - range.lo) / h)) + 1;
    xs.resize(n);
    for (std::size_t i = 0; i < n; ++i) xs[i] = range.lo + static_cast<double>(i) * h;
  }
  const SeparableSampler sampler(assemble_longitudinal(spec, t, xs, opt), spec.phase);
  PushForwardOptions po;
  po.components = spec.components();
  po.time = t;
  po.epsilon = spec.epsilon();
  po.window_center = window_center;
  return push_forward(map, sampler, grid, po);
}

}  // namespace edgewave
