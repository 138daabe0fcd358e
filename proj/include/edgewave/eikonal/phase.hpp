#pragma once

#include <algorithm>
#include <cmath>
#include <limits>
#include <memory>
#include <optional>
#include <ostream>
#include <vector>

#include "edgewave/core/error.hpp"
#include "edgewave/core/quadrature.hpp"
#include "edgewave/geometry/level_curve.hpp"
#include "edgewave/spectral/branches.hpp"

namespace edgewave {

struct Interval {
  double lo = 0.0;
  double hi = 0.0;
  bool contains(double v) const { return v >= lo && v <= hi; }
  double width() const { return hi - lo; }
};

/// Wavenumber support Ξ as a union of closed intervals.
struct Support {
  std::vector<Interval> parts;

  static Support interval(double lo, double hi) { return Support{{{lo, hi}}}; }
  bool empty() const {
    return parts.empty() || std::all_of(parts.begin(), parts.end(), [](const Interval& i) { return !(i.hi > i.lo); });
  }
  bool contains(double xi) const {
    return std::any_of(parts.begin(), parts.end(), [&](const Interval& i) { return i.contains(xi); });
  }
  double min_abs() const {
    double m = std::numeric_limits<double>::infinity();
    for (const auto& i : parts) m = std::min(m, (i.lo <= 0.0 && i.hi >= 0.0) ? 0.0 : std::min(std::abs(i.lo), std::abs(i.hi)));
    return m;
  }
  /// Sorted sample grid with about `per_unit` points per unit ξ, at least 64 per part.
  std::vector<double> grid(double per_unit = 200.0) const {
    std::vector<double> g;
    for (const auto& i : parts) {
      const int n = std::max(64, static_cast<int>(std::ceil(i.width() * per_unit)));
      for (int k = 0; k <= n; ++k) g.push_back(i.lo + i.width() * k / n);
    }
    std::sort(g.begin(), g.end());
    g.erase(std::unique(g.begin(), g.end()), g.end());
    return g;
  }
};

struct PhaseOptions {
  double turning_margin = 1e-6;
  double grid_per_unit = 200.0;  ///< ξ-grid density for root scans
  double hessian_floor = 1e-10;
};

/// ∂^n_ξ of the phase G = −B t + A at one (t, x̃, ξ).
struct PhaseDerivs {
  double G = 0.0;
  double dG = 0.0;
  double d2G = 0.0;
};

/// Separable phase G(t, x̃, ξ) = −B(ξ) t + A(x̃, ξ) of one branch, launched at x0.
///
/// B(ξ) = E(ξ, μ(x0)) and ∂_x A = k(x̃, ξ) with k² = ξ² + 2m(μ(x0) − μ(x̃)),
/// sgn k = sgn ξ, A(x0, ξ) = 0. The ξ-derivatives of A are integrals of
/// ∂_ξk = ξ/k and ∂²_ξk = (k² − ξ²)/k³.
class PhaseSolution {
 public:
  PhaseSolution(BranchSpec branch, std::shared_ptr<const LevelCurve> curve, double x0, Support xi_support,
                Interval x_range, PhaseOptions opt = {})
      : branch_(branch), curve_(std::move(curve)), x0_(x0), support_(std::move(xi_support)), opt_(opt) {
    if (!curve_) fail(ErrorCode::ConfigError, "phase needs a traced curve");
    if (support_.empty()) fail(ErrorCode::EmptySupport, "wavenumber support is empty");
    if (!x_range.contains(x0)) fail(ErrorCode::ConfigError, "launch point x0 outside the x~ range");
    if (!curve_->in_range(x_range.lo) || !curve_->in_range(x_range.hi))
      fail(ErrorCode::OutOfRange, "x~ range exceeds the traced curve");
    if (branch_.model() == Model::KleinGordon && branch_.m() == 0 && support_.contains(0.0))
      fail(ErrorCode::ConfigError, "KG m = 0 support must avoid xi = 0");
    mu0_ = curve_->slope(x0);
    xi_grid_ = support_.grid(opt_.grid_per_unit);
    detect_constant_slope(x_range);
    find_valid_range(x_range);
  }

  const BranchSpec& branch() const { return branch_; }
  const LevelCurve& curve() const { return *curve_; }
  std::shared_ptr<const LevelCurve> curve_ptr() const { return curve_; }
  double x0() const { return x0_; }
  double mu0() const { return mu0_; }
  const Support& support() const { return support_; }
  const std::vector<double>& xi_grid() const { return xi_grid_; }
  const Interval& valid_range() const { return valid_; }
  /// True if valid_range was cut short by a turning point.
  bool truncated() const { return truncated_; }
  bool constant_slope() const { return constant_mu_; }

  double slope(double x) const { return constant_mu_ ? mu0_ : curve_->slope(x); }

  double B(double xi) const { return dispersion(branch_, xi, mu0_); }
  double dB(double xi) const { return group_velocity(branch_, xi, mu0_); }
  double d2B(double xi) const { return dispersion_curvature(branch_, xi, mu0_); }

  /// k(x̃, ξ) = ∂_x A.
  double k(double x, double xi) const {
    if (relativistic() || constant_mu_) return xi;
    const double k2 = k_squared(x, xi);
    if (k2 < 0.0) fail(ErrorCode::OutsideValidity, "beyond a turning point", {x, xi});
    return std::copysign(std::sqrt(k2), xi);
  }

  /// (A, ∂_ξA, ∂²_ξA) at (x̃, ξ).
  std::array<double, 3> A(double x, double xi) const {
    require_valid(x);
    if (relativistic() || constant_mu_) {
      const double d = x - x0_;
      return {xi * d, d, 0.0};
    }
    return integrate_segment(x0_, x, xi);
  }

  PhaseDerivs eval(double t, double x, double xi) const {
    const auto a = A(x, xi);
    return {-B(xi) * t + a[0], -dB(xi) * t + a[1], -d2B(xi) * t + a[2]};
  }

  /// Tabulates A and k on sorted x̃ samples for one ξ by cumulative panel
  /// integration outward from x0.
  void tabulate(const std::vector<double>& xs, double xi, std::vector<double>& a_out, std::vector<double>& k_out) const {
    a_out.resize(xs.size());
    k_out.resize(xs.size());
    for (double x : {xs.front(), xs.back()}) require_valid(x);
    if (relativistic() || constant_mu_) {
      const double kk = xi;
      for (std::size_t i = 0; i < xs.size(); ++i) {
        a_out[i] = xi * (xs[i] - x0_);
        k_out[i] = kk;
      }
      return;
    }
    const auto start = std::lower_bound(xs.begin(), xs.end(), x0_) - xs.begin();
    double acc = 0.0, prev = x0_;
    for (auto i = start; i < static_cast<std::ptrdiff_t>(xs.size()); ++i) {
      acc += integrate_segment(prev, xs[i], xi)[0];
      prev = xs[i];
      a_out[i] = acc;
      k_out[i] = k(xs[i], xi);
    }
    acc = 0.0;
    prev = x0_;
    for (auto i = start; i-- > 0;) {
      acc += integrate_segment(prev, xs[i], xi)[0];
      prev = xs[i];
      a_out[i] = acc;
      k_out[i] = k(xs[i], xi);
    }
  }

  /// Root of ∂_ξA(x̃, ξ) = ∂_ξB(ξ) t in x̃: the ray position of wavenumber ξ at time t.
  double ray_position(double t, double xi) const {
    const double v = dB(xi);
    if (relativistic() || constant_mu_) {
      const double x = x0_ + v * t;
      require_valid(x);
      return x;
    }
    double x = x0_ + v * t;
    for (int it = 0; it < 60; ++it) {
      x = std::clamp(x, valid_.lo, valid_.hi);
      const double f = A(x, xi)[1] - v * t;
      const double fp = xi / k(x, xi);
      const double dx = f / fp;
      x -= dx;
      if (std::abs(dx) < 1e-14 * (1.0 + std::abs(x))) break;
    }
    require_valid(x);
    return x;
  }

  void write_csv(std::ostream& os, const std::vector<double>& xs, const std::vector<double>& xis) const {
    os << "x̃,ξ,A,∂_xA,∂_ξA\n";
    os.precision(17);
    for (double x : xs)
      for (double xi : xis) {
        const auto a = A(x, xi);
        os << x << ',' << xi << ',' << a[0] << ',' << k(x, xi) << ',' << a[1] << '\n';
      }
  }

  bool relativistic() const { return branch_.m() == 0; }

  void require_valid(double x) const {
    if (!(x >= valid_.lo - 1e-12 && x <= valid_.hi + 1e-12))
      fail(ErrorCode::OutsideValidity, "x~ outside the turning-point-free range", {x, valid_.lo, valid_.hi});
  }

 private:
  double k_squared(double x, double xi) const {
    return xi * xi + 2.0 * branch_.m() * (mu0_ - slope(x));
  }

  /// ∫_a^b (k, ∂_ξk, ∂²_ξk) dx̃ by 10-point Gauss–Legendre panels no longer than
  /// the curve's sample spacing.
  std::array<double, 3> integrate_segment(double a, double b, double xi) const {
    std::array<double, 3> sum{0.0, 0.0, 0.0};
    if (a == b) return sum;
    const int panels = std::max(1, static_cast<int>(std::ceil(std::abs(b - a) / panel_)));
    const auto& ref = quad::gauss_legendre_cached(10);
    const double h = (b - a) / panels;
    for (int p = 0; p < panels; ++p) {
      const double c = a + (p + 0.5) * h;
      for (std::size_t q = 0; q < ref.size(); ++q) {
        const double x = c + 0.5 * h * ref.nodes[q];
        const double w = 0.5 * h * ref.weights[q];
        const double kk = k(x, xi);
        sum[0] += w * kk;
        sum[1] += w * xi / kk;
        sum[2] += w * (kk * kk - xi * xi) / (kk * kk * kk);
      }
    }
    return sum;
  }

  void detect_constant_slope(const Interval& r) {
    double lo = mu0_, hi = mu0_;
    const int n = 2000;
    for (int i = 0; i <= n; ++i) {
      const double m = curve_->slope(r.lo + r.width() * i / n);
      lo = std::min(lo, m);
      hi = std::max(hi, m);
    }
    constant_mu_ = (hi - lo) <= 1e-10 * mu0_;
    const auto& smp = curve_->samples();
    double gap = r.width();
    for (std::size_t i = 1; i < smp.size(); ++i) gap = std::min(gap, smp[i].s - smp[i - 1].s);
    panel_ = std::max(gap, 1e-3);
  }

  void find_valid_range(const Interval& r) {
    valid_ = r;
    truncated_ = false;
    if (relativistic() || constant_mu_) return;
    const double xi_min = support_.min_abs();
    if (xi_min * xi_min <= opt_.turning_margin)
      fail(ErrorCode::TurningPointAtLaunch, "support reaches the turning threshold at the launch point", {x0_});
    const double step = std::min(panel_, r.width() / 4000.0);
    auto ok = [&](double x) { return k_squared(x, xi_min) > opt_.turning_margin; };
    auto scan = [&](double dir, double limit) {
      double x = x0_;
      while (true) {
        const double next = dir > 0 ? std::min(x + step, limit) : std::max(x - step, limit);
        if (!ok(next)) {
          // bisect to the threshold
          double a = x, b = next;
          for (int i = 0; i < 60; ++i) {
            const double m = 0.5 * (a + b);
            (ok(m) ? a : b) = m;
          }
          truncated_ = true;
          return a;
        }
        if (next == limit) return limit;
        x = next;
      }
    };
    valid_.hi = scan(+1.0, r.hi);
    valid_.lo = scan(-1.0, r.lo);
  }

  BranchSpec branch_;
  std::shared_ptr<const LevelCurve> curve_;
  double x0_;
  Support support_;
  PhaseOptions opt_;
  double mu0_ = 1.0;
  std::vector<double> xi_grid_;
  Interval valid_;
  bool truncated_ = false;
  bool constant_mu_ = false;
  double panel_ = 0.05;
};

inline PhaseSolution solve_phase(const ModelSpec& model, const BranchSpec& branch,
                                 std::shared_ptr<const LevelCurve> curve, double x0, Support xi_support,
                                 Interval x_range, PhaseOptions opt = {}) {
  if (model.model != branch.model()) fail(ErrorCode::InvalidBranch, "branch belongs to a different model");
  return PhaseSolution(branch, std::move(curve), x0, std::move(xi_support), x_range, opt);
}

/// ξ* with ∂_ξG(t, x̃, ξ*) = 0 inside Ξ, by a sign-change scan over the ξ grid
/// and bracketed Newton. None when no root lies in Ξ; MultipleRoots carries all.
inline std::optional<double> stationary_point(const PhaseSolution& ph, double t, double x) {
  if (t == 0.0) fail(ErrorCode::OutOfRange, "stationary point needs t != 0");
  ph.require_valid(x);
  if (ph.relativistic()) {
    const double g = ph.eval(t, x, 0.0).dG;
    if (std::abs(g) > 1e-12 * (1.0 + std::abs(t))) return std::nullopt;
    fail(ErrorCode::DegenerateHessian, "relativistic phase is linear in xi");
  }
  const auto& grid = ph.xi_grid();
  auto dg = [&](double xi) { return ph.eval(t, x, xi).dG; };
  std::vector<double> roots;
  double prev = dg(grid[0]);
  if (prev == 0.0) roots.push_back(grid[0]);
  for (std::size_t i = 1; i < grid.size(); ++i) {
    const double cur = dg(grid[i]);
    if (cur == 0.0) {
      roots.push_back(grid[i]);
    } else if (prev * cur < 0.0 && ph.support().contains(0.5 * (grid[i - 1] + grid[i]))) {
      double lo = grid[i - 1], hi = grid[i], flo = prev;
      double xi = 0.5 * (lo + hi);
      bool done = false;
      for (int it = 0; it < 100 && !done; ++it) {
        const auto d = ph.eval(t, x, xi);
        if (std::abs(d.dG) < 1e-15 * (1.0 + std::abs(t))) break;
        if ((d.dG > 0) == (flo > 0)) {
          lo = xi;
          flo = d.dG;
        } else {
          hi = xi;
        }
        double next = xi - d.dG / d.d2G;
        if (!(next > lo && next < hi)) next = 0.5 * (lo + hi);
        done = std::abs(next - xi) < 1e-15 * (1.0 + std::abs(xi));
        xi = next;
      }
      roots.push_back(xi);
    }
    prev = cur;
  }
  if (roots.empty()) return std::nullopt;
  if (roots.size() > 1) fail(ErrorCode::MultipleRoots, "several stationary points", roots);
  if (std::abs(dg(roots[0])) > 1e-11 * (1.0 + std::abs(t)))
    fail(ErrorCode::NoConvergence, "stationary-point Newton did not converge", roots);
  return roots[0];
}

/// ∂²_ξG at a stationary point; DegenerateHessian near caustics.
inline double phase_hessian(const PhaseSolution& ph, double t, double x, double xi_star,
                            double floor = PhaseOptions{}.hessian_floor) {
  const double h = ph.relativistic() ? 0.0 : ph.eval(t, x, xi_star).d2G;
  if (!(std::abs(h) > floor * (1.0 + std::abs(t)))) fail(ErrorCode::DegenerateHessian, "vanishing phase Hessian", {h});
  return h;
}

}  // namespace edgewave
