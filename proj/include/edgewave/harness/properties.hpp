#pragma once

#include <Eigen/Dense>
#include <Eigen/Eigenvalues>

#include <algorithm>
#include <cmath>
#include <memory>
#include <random>
#include <vector>

#include "edgewave/core/quadrature.hpp"
#include "edgewave/eikonal/phase.hpp"
#include "edgewave/geometry/domain_wall.hpp"
#include "edgewave/geometry/level_curve.hpp"
#include "edgewave/geometry/rectification.hpp"
#include "edgewave/harness/report.hpp"
#include "edgewave/pde/solvers.hpp"
#include "edgewave/spectral/branches.hpp"
#include "edgewave/spectral/hermite.hpp"
#include "edgewave/wavepacket/field.hpp"

namespace edgewave {

namespace detail {

/// Lowest eigenvalues of −d²/dz² + μ²z² on |z| ≤ 12, second-order finite
/// differences on `points` interior nodes.
inline std::vector<double> fd_oscillator_levels(double mu, int points, int count) {
  const double half = 12.0, h = 2.0 * half / (points + 1);
  Eigen::VectorXd diag(points), off(points - 1);
  for (int i = 0; i < points; ++i) {
    const double z = -half + (i + 1) * h;
    diag[i] = 2.0 / (h * h) + mu * mu * z * z;
  }
  off.setConstant(-1.0 / (h * h));
  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es;
  es.computeFromTridiagonal(diag, off, Eigen::EigenvaluesOnly);
  return {es.eigenvalues().data(), es.eigenvalues().data() + count};
}

/// |E| levels of ξσ₁ + σ₂D_z + μzσ₃ from T² = ξ² − ∂² + μ²z² + μσ₁ on the
/// σ₁ = −1 sector, Richardson-extrapolated from 2000 and 1000 nodes.
inline std::vector<double> fd_dirac_levels(double xi, double mu, int count) {
  const auto fine = fd_oscillator_levels(mu, 2000, count), coarse = fd_oscillator_levels(mu, 1000, count);
  const double hf = 24.0 / 2001, hc = 24.0 / 1001, r = (hc * hc) / (hf * hf);
  std::vector<double> out(count);
  for (int i = 0; i < count; ++i) out[i] = std::sqrt(xi * xi + (r * fine[i] - coarse[i]) / (r - 1.0) - mu);
  return out;
}

inline void geometry_properties(std::uint64_t seed, std::vector<ReportRow>& rows) {
  const auto wall = DomainWall::analytic("x^2/1.5 + y^2*1.2 - 1", {-3, 3, -3, 3});
  auto curve = std::make_shared<const LevelCurve>(trace_level_set(wall, {1.2, 0.0}, 0.01, 20.0));
  const double L = curve->total_length();
  double frame = 0.0;
  for (const auto& s : curve->samples()) {
    const double det = s.tangent.x * s.normal.y - s.tangent.y * s.normal.x;
    frame = std::max({frame, std::abs(det - 1.0), std::abs(dot(s.tangent, s.normal)), std::abs(norm(s.tangent) - 1.0)});
  }
  rows.push_back(ReportRow::check("props", NAN, NAN, "geometry_frame_defect", frame, Tolerance::below(1e-12)));

  double speed = 0.0;
  const double h = 1e-5;
  for (int i = 0; i < 1000; ++i) {
    const double s = L * (i + 0.37) / 1000;
    speed = std::max(speed, std::abs(norm(curve->point(s + h) - curve->point(s - h)) / (2 * h) - 1.0));
  }
  rows.push_back(ReportRow::check("props", NAN, NAN, "geometry_arclength_defect", speed, Tolerance::below(1e-8)));

  const RectificationMap map(curve, std::nullopt, wall.bounds());
  std::mt19937_64 rng(seed);
  std::uniform_real_distribution<double> us(0.0, L), uy(-map.eta(), map.eta());
  double trip = 0.0;
  for (int i = 0; i < 1000; ++i) {
    const double s = us(rng), y = uy(rng);
    const TubeCoords t = map.inverse(map.forward(s, y));
    double ds = std::abs(t.s - s);
    ds = std::min(ds, L - ds);
    trip = std::max({trip, ds, std::abs(t.yt - y)});
  }
  rows.push_back(ReportRow::check("props", NAN, NAN, "geometry_round_trip", trip, Tolerance::below(1e-10)));

  const auto wavy = DomainWall::analytic("y - 0.3*sin(x) + 0.1*y^2", {-4, 4, -2, 2});
  auto wc = std::make_shared<const LevelCurve>(trace_level_set(wavy, {0.0, 0.0}, 0.02, 6.0));
  const RectificationMap wm(wc, 0.3);
  std::uniform_real_distribution<double> ws(-2.0, 2.0);
  double lo = INFINITY, hi = 0.0;
  for (int i = 0; i < 50; ++i) {
    const double s = ws(rng);
    auto defect = [&](double y) { return std::abs(wavy.value(wm.forward(s, y)) - y * wall_slope(*wc, s)); };
    const double ratio = defect(0.2) / defect(0.1);
    lo = std::min(lo, ratio);
    hi = std::max(hi, ratio);
  }
  rows.push_back(ReportRow::check("props", NAN, NAN, "geometry_taylor_ratio_min", lo, Tolerance::at_least(4.0 / 1.5)));
  rows.push_back(ReportRow::check("props", NAN, NAN, "geometry_taylor_ratio_max", hi, Tolerance::below(4.0 * 1.5)));
}

inline void spectral_properties(std::vector<ReportRow>& rows) {
  const quad::Rule rule = quad::composite(-14.0, 14.0, 200, 16);
  double ortho = 0.0;
  for (int i = 0; i <= 12; ++i)
    for (int j = i; j <= 12; ++j) {
      double ip = 0.0;
      for (std::size_t q = 0; q < rule.size(); ++q) ip += rule.weights[q] * hermite(i, rule.nodes[q]) * hermite(j, rule.nodes[q]);
      ortho = std::max(ortho, std::abs(ip - (i == j ? 1.0 : 0.0)));
    }
  rows.push_back(ReportRow::check("props", NAN, NAN, "spectral_orthonormality", ortho, Tolerance::below(1e-9)));

  double ladder = 0.0;
  const double h = 1e-5;
  for (int m = 1; m <= 10; ++m)
    for (double z = -8.0; z <= 8.0; z += 0.25) {
      const double d = (hermite(m, z + h) - hermite(m, z - h)) / (2 * h);
      ladder = std::max(ladder, std::abs(z * hermite(m, z) + d - std::sqrt(2.0 * m) * hermite(m - 1, z)));
    }
  rows.push_back(ReportRow::check("props", NAN, NAN, "spectral_ladder_identity", ladder, Tolerance::below(1e-8)));

  double diag = 0.0;
  for (double xi : {-2.0, 0.0, 2.0}) {
    const auto levels = fd_dirac_levels(xi, 1.0, 4);
    diag = std::max(diag, std::abs(std::abs(dispersion(BranchSpec::dirac_relativistic(), xi, 1.0)) - levels[0]));
    for (int m = 1; m <= 3; ++m)
      for (int s : {-1, 1})
        diag = std::max(diag, std::abs(dispersion(BranchSpec::create(Model::Dirac, m, s), xi, 1.0) - s * levels[m]));
  }
  rows.push_back(ReportRow::check("props", NAN, NAN, "spectral_diagonalization", diag, Tolerance::below(1e-4)));

  double vg = 0.0, vmax = 0.0;
  const double d = 1e-4;
  for (int m = 1; m <= 3; ++m)
    for (int s : {-1, 1})
      for (double mu : {0.5, 2.0})
        for (double xi = -4.0; xi <= 4.0; xi += 0.5) {
          const auto b = BranchSpec::create(Model::Dirac, m, s);
          const double fd = (dispersion(b, xi - 2 * d, mu) - 8 * dispersion(b, xi - d, mu) + 8 * dispersion(b, xi + d, mu) -
                             dispersion(b, xi + 2 * d, mu)) / (12 * d);
          vg = std::max(vg, std::abs(group_velocity(b, xi, mu) - fd));
          vmax = std::max(vmax, std::abs(group_velocity(b, xi, mu)));
        }
  rows.push_back(ReportRow::check("props", NAN, NAN, "spectral_group_velocity_fd", vg, Tolerance::below(1e-8)));
  rows.push_back(ReportRow::check("props", NAN, NAN, "spectral_max_group_speed", vmax, Tolerance::below(1.0)));
}

inline void eikonal_properties(std::vector<ReportRow>& rows) {
  auto curve = std::make_shared<const LevelCurve>(
      trace_level_set(DomainWall::analytic("y*(1 + 0.2*sin(x))", {-8, 8, -2, 2}), {0, 0}, 0.005, 14.0));
  double eik = 0.0, hess = 0.0;
  for (int m : {1, 2}) {
    const auto b = BranchSpec::create(Model::Dirac, m, 1);
    const PhaseSolution ph(b, curve, 0.3, Support::interval(1.0, 3.0), {-5, 5});
    for (double xi : ph.xi_grid())
      for (double x = -5.0; x <= 5.0; x += 0.1)
        eik = std::max(eik, std::abs(dispersion(b, ph.k(x, xi), ph.slope(x)) - ph.B(xi)));
    const double h = 1e-5;
    for (double t : {0.7, 1.5, 3.0})
      for (double xi0 : {1.2, 1.5, 2.5}) {
        const double xc = ph.ray_position(t, xi0);
        const auto r = stationary_point(ph, t, xc);
        if (!r) {
          hess = INFINITY;
          continue;
        }
        const double g2 = phase_hessian(ph, t, xc, *r);
        const double fd = (ph.eval(t, xc, *r + h).dG - ph.eval(t, xc, *r - h).dG) / (2 * h);
        hess = std::max(hess, std::abs(g2 - fd) / (1.0 + std::abs(g2)));
      }
  }
  rows.push_back(ReportRow::check("props", NAN, NAN, "eikonal_residual", eik, Tolerance::below(1e-10)));
  rows.push_back(ReportRow::check("props", NAN, NAN, "eikonal_hessian_fd", hess, Tolerance::below(1e-6)));
}

inline void solver_properties(double steps, std::vector<ReportRow>& rows) {
  const double eps = 0.05, se = std::sqrt(eps);
  const Rect box{-1.5, 1.5, -1, 1};
  const Grid g = Grid::covering(box, se / 8);
  const auto wall = WallSamples::sample(DomainWall::flat(box), g);
  Field u(g, 2, 0.0, eps);
  for (std::size_t iy = 0; iy < g.ny; ++iy)
    for (std::size_t ix = 0; ix < g.nx; ++ix) {
      const double x = g.x(ix) / se, y = g.y(iy) / se;
      const double v = std::exp(-0.5 * (x * x + y * y)) * std::cos(0.3 * x);
      u.at(0, ix, iy) = v;
      u.at(1, ix, iy) = -0.5 * v;
    }
  DiracSolver dirac(g, wall.kappa, eps);
  const double n0 = u.l2_norm();
  const auto n = static_cast<long>(steps);
  for (long k = 0; k < n; ++k) dirac.step(u, 1e-3);
  rows.push_back(ReportRow::check("props", eps, u.time, "solver_dirac_norm_drift", std::abs(u.l2_norm() / n0 - 1.0),
                                  Tolerance::below(1e-10)));

  KGSolver kg(g, wall, eps);
  KGState s{Field(g, 1, 0.0, eps), Field(g, 1, 0.0, eps)};
  for (std::size_t i = 0; i < g.size(); ++i) s.u.data[i] = u.data[i];
  const auto nk = static_cast<long>(std::ceil(2.0 / kg.stability_limit()));
  const double dt = 1.0 / static_cast<double>(nk);
  const double e0 = kg.discrete_energy(s, dt);
  for (long k = 0; k < nk; ++k) kg.step(s, dt);
  rows.push_back(ReportRow::check("props", eps, 1.0, "solver_kg_energy_drift", std::abs(kg.discrete_energy(s, dt) / e0 - 1.0),
                                  Tolerance::below(1e-6)));
}

}  // namespace detail

/// Geometry, spectral, eikonal and solver invariants as report rows.
inline std::vector<ReportRow> run_properties(std::uint64_t seed, double solver_steps = 1e4) {
  std::vector<ReportRow> rows;
  detail::geometry_properties(seed, rows);
  detail::spectral_properties(rows);
  detail::eikonal_properties(rows);
  detail::solver_properties(solver_steps, rows);
  return rows;
}

}  // namespace edgewave
