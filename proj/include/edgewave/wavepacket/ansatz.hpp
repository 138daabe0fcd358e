#pragma once

#include <algorithm>
#include <array>
#include <cmath>
#include <memory>
#include <optional>
#include <string>
#include <vector>

#include "edgewave/core/error.hpp"
#include "edgewave/core/parallel.hpp"
#include "edgewave/core/quadrature.hpp"
#include "edgewave/core/types.hpp"
#include "edgewave/eikonal/phase.hpp"
#include "edgewave/spectral/profile.hpp"
#include "edgewave/wavepacket/envelope.hpp"

namespace edgewave {

/// Leading-order (J = 0) wavepacket of one branch.
struct WavepacketSpec {
  ModelSpec model;
  BranchSpec branch;
  std::shared_ptr<const PhaseSolution> phase;
  Envelope envelope;
  int J = 0;

  double x0() const { return phase->x0(); }
  double epsilon() const { return model.epsilon; }
  int components() const { return model.model == Model::Dirac ? 2 : 1; }

  void validate() const {
    model.validate();
    if (!phase) fail(ErrorCode::ConfigError, "wavepacket needs a phase solution");
    if (model.model != branch.model() || !(phase->branch() == branch))
      fail(ErrorCode::InvalidBranch, "model, branch and phase disagree");
    if (J != 0) fail(ErrorCode::ConfigError, "only the leading order J = 0 is implemented");
    const Interval w = envelope.window();
    for (double xi : {w.lo, w.hi, 0.5 * (w.lo + w.hi)})
      if (!phase->support().contains(xi))
        fail(ErrorCode::ConfigError, "envelope window exceeds the phase support");
  }
};

struct AssemblyOptions {
  int points_per_oscillation = 8;
  int panel_order = 16;
  double horizon_factor = 0.5;  ///< warn when √ε·|t| exceeds this
  std::size_t max_nodes = 1u << 20;
  /// Replaces the automatic ξ rule; the caller owns its resolution.
  std::optional<quad::Rule> rule;
  /// Assemble ε∂_t v instead of v (factor −i√ε B(ξ) in the integrand).
  bool time_derivative = false;
};

/// Longitudinal coefficients of v(t, x̃, ỹ) on sorted x̃ nodes:
/// v = μ^{1/4}[lower(x̃) φ_{m−1}(√μ ỹ/√ε) + upper(x̃) φ_m(√μ ỹ/√ε)] per component,
/// μ = μ(x̃). KG uses only `upper` in component 0.
struct LongitudinalTable {
  std::vector<double> xs;
  std::vector<double> mu;
  std::array<std::vector<cplx>, 2> lower, upper;
  BranchSpec branch = BranchSpec::dirac_relativistic();
  int ncomp = 2;
  double epsilon = 0.0;
  double time = 0.0;
  double carrier = 0.0;  ///< dominant wavenumber / √ε, for demodulated interpolation
  std::vector<std::string> warnings;

  /// Transverse synthesis at node i.
  Spinor at_node(std::size_t i, double yt) const {
    return synthesize(mu[i], lower[0][i], lower[1][i], upper[0][i], upper[1][i], yt);
  }

  Spinor synthesize(double m_u, cplx l0, cplx l1, cplx u0, cplx u1, double yt) const {
    const int m = branch.m();
    const double z = std::sqrt(m_u / epsilon) * yt;
    const double c = std::pow(m_u, 0.25);
    const auto phi = hermite_all(m, z);
    const double hi = c * phi[m];
    const double lo = m > 0 ? c * phi[m - 1] : 0.0;
    if (ncomp == 1) return {u0 * hi, 0.0};
    return {l0 * lo + u0 * hi, l1 * lo + u1 * hi};
  }
};

namespace detail {

/// Largest |∂_ξG| over the ξ window and the x̃ range ends.
inline double max_phase_slope(const PhaseSolution& ph, double t, const std::vector<double>& xs, const Interval& w) {
  double m = 0.0;
  for (double x : {xs.front(), xs.back(), ph.x0()}) {
    if (x < ph.valid_range().lo || x > ph.valid_range().hi) continue;
    for (int i = 0; i <= 32; ++i) {
      const double xi = w.lo + w.width() * i / 32.0;
      m = std::max(m, std::abs(ph.eval(t, x, xi).dG));
    }
  }
  return m;
}

}  // namespace detail

/// ξ-quadrature rule for the ansatz integral at time t over the x̃ nodes:
/// Gauss–Legendre panels with ≥ points_per_oscillation nodes per period of
/// e^{iG/√ε} and at least 64 nodes per unit envelope width.
inline quad::Rule ansatz_rule(const WavepacketSpec& spec, double t, const std::vector<double>& xs,
                              const AssemblyOptions& opt = {}) {
  if (opt.rule) return *opt.rule;
  const Interval w = spec.envelope.window();
  const double slope = detail::max_phase_slope(*spec.phase, t, xs, w);
  const double oscillations = slope * w.width() / (2.0 * pi * std::sqrt(spec.epsilon()));
  const double width_nodes = 64.0 * w.width() / std::max(spec.envelope.width(), 1e-12);
  const double need = std::max({opt.points_per_oscillation * oscillations, width_nodes, 64.0});
  const auto nodes = static_cast<std::size_t>(std::ceil(need));
  if (nodes > opt.max_nodes)
    fail(ErrorCode::UnderResolvedQuadrature, "ansatz integral needs too many quadrature nodes",
         {static_cast<double>(nodes), oscillations});
  const int panels = static_cast<int>((nodes + opt.panel_order - 1) / opt.panel_order);
  return quad::composite(w.lo, w.hi, panels, opt.panel_order);
}

/// Evaluates the ansatz v = ε^{−1/2} ∫ e^{iG/√ε} f(ξ) Ψ_{k(x̃,ξ), μ(x̃)}(ỹ/√ε) dξ
/// as longitudinal coefficients on the sorted x̃ nodes.
inline LongitudinalTable assemble_longitudinal(const WavepacketSpec& spec, double t, std::vector<double> xs,
                                               const AssemblyOptions& opt = {}) {
  spec.validate();
  if (xs.empty()) fail(ErrorCode::ConfigError, "no x~ samples");
  std::sort(xs.begin(), xs.end());
  const PhaseSolution& ph = *spec.phase;
  ph.require_valid(xs.front());
  ph.require_valid(xs.back());
  const double eps = spec.epsilon();
  const double se = std::sqrt(eps);

  LongitudinalTable tab;
  tab.branch = spec.branch;
  tab.ncomp = spec.components();
  tab.epsilon = eps;
  tab.time = t;
  tab.carrier = spec.envelope.center() / se;
  if (se * std::abs(t) > opt.horizon_factor)
    tab.warnings.push_back("t beyond the validity horizon: sqrt(eps)*|t| = " + std::to_string(se * std::abs(t)));
  const std::size_t n = xs.size();
  tab.mu.resize(n);
  for (std::size_t i = 0; i < n; ++i) tab.mu[i] = ph.slope(xs[i]);
  for (auto* v : {&tab.lower[0], &tab.lower[1], &tab.upper[0], &tab.upper[1]}) v->assign(n, cplx(0.0));

  const quad::Rule rule = ansatz_rule(spec, t, xs, opt);
  const bool dirac = spec.components() == 2;
  const bool uniform_profile = ph.constant_slope() || ph.relativistic();

  // per-node weights f(ξ)·w_q·(time factor)·ε^{−1/2}
  std::vector<cplx> weight(rule.size());
  std::vector<double> bval(rule.size());
  for (std::size_t q = 0; q < rule.size(); ++q) {
    const double xi = rule.nodes[q];
    bval[q] = ph.B(xi);
    cplx w = rule.weights[q] * spec.envelope(xi) / se;
    if (opt.time_derivative) w *= cplx(0.0, -se * bval[q]);
    weight[q] = w;
  }
  std::vector<std::array<double, 4>> spin;  // lower0, lower1, upper0, upper1 per ξ when μ is constant
  if (dirac && uniform_profile) {
    spin.resize(rule.size());
    for (std::size_t q = 0; q < rule.size(); ++q) {
      const TransverseProfile p(spec.branch, rule.nodes[q], ph.mu0());
      spin[q] = {p.lower()[0], p.lower()[1], p.upper()[0], p.upper()[1]};
    }
  }

  const std::size_t workers = std::max<std::size_t>(1, std::min<std::size_t>(thread_count(), n));
  const std::size_t chunk = (n + workers - 1) / workers;
  parallel_for(0, workers, [&](std::size_t w) {
    const std::size_t lo = w * chunk, hi = std::min(n, lo + chunk);
    if (lo >= hi) return;
    const std::vector<double> part(xs.begin() + lo, xs.begin() + hi);
    std::vector<double> a, k;
    for (std::size_t q = 0; q < rule.size(); ++q) {
      const double xi = rule.nodes[q];
      ph.tabulate(part, xi, a, k);
      for (std::size_t j = 0; j < part.size(); ++j) {
        const double g = -bval[q] * t + a[j];
        const cplx e = weight[q] * std::polar(1.0, g / se);
        const std::size_t i = lo + j;
        if (!dirac) {
          tab.upper[0][i] += e;
          continue;
        }
        std::array<double, 4> s;
        if (uniform_profile) {
          s = spin[q];
        } else {
          const TransverseProfile p(spec.branch, k[j], tab.mu[i]);
          s = {p.lower()[0], p.lower()[1], p.upper()[0], p.upper()[1]};
        }
        tab.lower[0][i] += e * s[0];
        tab.lower[1][i] += e * s[1];
        tab.upper[0][i] += e * s[2];
        tab.upper[1][i] += e * s[3];
      }
    }
  });
  tab.xs = std::move(xs);
  return tab;
}

/// Uniform nodes lo, lo + h, …, covering [lo, hi].
inline std::vector<double> uniform_nodes(double lo, double hi, double h) {
  const auto n = static_cast<std::size_t>(std::ceil((hi - lo) / h - 1e-9)) + 1;
  std::vector<double> xs(n);
  for (std::size_t i = 0; i < n; ++i) xs[i] = lo + static_cast<double>(i) * h;
  return xs;
}

/// Evaluates a LongitudinalTable on uniform x̃ nodes at arbitrary (x̃, ỹ):
/// 6-point Lagrange interpolation of the demodulated coefficients in x̃ and exact
/// Hermite functions in ỹ. Outside the table the value is zero.
class SeparableSampler {
 public:
  SeparableSampler(LongitudinalTable table, std::shared_ptr<const PhaseSolution> phase)
      : tab_(std::move(table)), phase_(std::move(phase)) {
    if (tab_.xs.size() < 6) fail(ErrorCode::ConfigError, "separable sampler needs >= 6 nodes");
    h_ = (tab_.xs.back() - tab_.xs.front()) / static_cast<double>(tab_.xs.size() - 1);
    for (std::size_t i = 1; i < tab_.xs.size(); ++i)
      if (std::abs(tab_.xs[i] - tab_.xs[i - 1] - h_) > 1e-9 * h_)
        fail(ErrorCode::ConfigError, "separable sampler needs uniform x~ nodes");
    for (auto* arr : {&tab_.lower[0], &tab_.lower[1], &tab_.upper[0], &tab_.upper[1]})
      for (std::size_t i = 0; i < arr->size(); ++i) (*arr)[i] *= std::polar(1.0, -tab_.carrier * tab_.xs[i]);
  }

  const LongitudinalTable& table() const { return tab_; }
  int components() const { return tab_.ncomp; }
  double x_min() const { return tab_.xs.front(); }
  double x_max() const { return tab_.xs.back(); }

  Spinor operator()(double s, double yt) const {
    const double last = static_cast<double>(tab_.xs.size() - 1);
    double u = (s - tab_.xs.front()) / h_;
    if (u < -1e-9 || u > last + 1e-9) return {0.0, 0.0};
    u = std::clamp(u, 0.0, last);
    const auto n = static_cast<std::ptrdiff_t>(tab_.xs.size());
    std::ptrdiff_t i0 = static_cast<std::ptrdiff_t>(std::floor(u)) - 2;
    i0 = std::clamp<std::ptrdiff_t>(i0, 0, n - 6);
    double w[6];
    for (int a = 0; a < 6; ++a) {
      double p = 1.0;
      for (int b = 0; b < 6; ++b)
        if (b != a) p *= (u - static_cast<double>(i0 + b)) / static_cast<double>(a - b);
      w[a] = p;
    }
    cplx l0 = 0.0, l1 = 0.0, u0 = 0.0, u1 = 0.0;
    for (int a = 0; a < 6; ++a) {
      const auto i = static_cast<std::size_t>(i0 + a);
      l0 += w[a] * tab_.lower[0][i];
      l1 += w[a] * tab_.lower[1][i];
      u0 += w[a] * tab_.upper[0][i];
      u1 += w[a] * tab_.upper[1][i];
    }
    const cplx carrier = std::polar(1.0, tab_.carrier * s);
    return tab_.synthesize(phase_->slope(s), l0 * carrier, l1 * carrier, u0 * carrier, u1 * carrier, yt);
  }

 private:
  LongitudinalTable tab_;
  std::shared_ptr<const PhaseSolution> phase_;
  double h_ = 1.0;
};

/// Ansatz sampled on a rectified tensor grid, interpolated bicubically.
struct RectifiedField {
  std::vector<double> xs, ys;  ///< uniform, ascending
  int ncomp = 2;
  double time = 0.0;
  double epsilon = 0.0;
  std::vector<cplx> values;  ///< [comp][iy][ix]
  std::vector<std::string> warnings;

  cplx at(int c, std::size_t ix, std::size_t iy) const { return values[(c * ys.size() + iy) * xs.size() + ix]; }

  /// Bicubic (4×4 Lagrange) interpolation; zero outside the grid.
  Spinor operator()(double s, double yt) const {
    const double hx = xs[1] - xs[0], hy = ys[1] - ys[0];
    double u = (s - xs.front()) / hx, v = (yt - ys.front()) / hy;
    const double ux = double(xs.size() - 1), vy = double(ys.size() - 1);
    if (u < -1e-9 || v < -1e-9 || u > ux + 1e-9 || v > vy + 1e-9) return {0.0, 0.0};
    u = std::clamp(u, 0.0, ux);
    v = std::clamp(v, 0.0, vy);
    auto stencil = [](double r, std::size_t n, std::ptrdiff_t& i0, double w[4]) {
      i0 = std::clamp<std::ptrdiff_t>(static_cast<std::ptrdiff_t>(std::floor(r)) - 1, 0,
                                      static_cast<std::ptrdiff_t>(n) - 4);
      for (int a = 0; a < 4; ++a) {
        double p = 1.0;
        for (int b = 0; b < 4; ++b)
          if (b != a) p *= (r - double(i0 + b)) / double(a - b);
        w[a] = p;
      }
    };
    std::ptrdiff_t ix, iy;
    double wx[4], wy[4];
    stencil(u, xs.size(), ix, wx);
    stencil(v, ys.size(), iy, wy);
    Spinor out{0.0, 0.0};
    for (int c = 0; c < ncomp; ++c)
      for (int b = 0; b < 4; ++b)
        for (int a = 0; a < 4; ++a) out[c] += wx[a] * wy[b] * at(c, std::size_t(ix + a), std::size_t(iy + b));
    return out;
  }
};

/// Ansatz at time t on the tensor grid xs × ys of rectified coordinates.
inline RectifiedField assemble_rectified(const WavepacketSpec& spec, double t, const std::vector<double>& xs,
                                         const std::vector<double>& ys, const AssemblyOptions& opt = {}) {
  if (ys.empty()) fail(ErrorCode::ConfigError, "no y~ samples");
  const LongitudinalTable tab = assemble_longitudinal(spec, t, xs, opt);
  RectifiedField r;
  r.xs = tab.xs;
  r.ys = ys;
  r.ncomp = tab.ncomp;
  r.time = t;
  r.epsilon = tab.epsilon;
  r.warnings = tab.warnings;
  r.values.assign(r.xs.size() * ys.size() * r.ncomp, cplx(0.0));
  for (std::size_t iy = 0; iy < ys.size(); ++iy)
    for (std::size_t ix = 0; ix < r.xs.size(); ++ix) {
      const Spinor v = tab.at_node(ix, ys[iy]);
      for (int c = 0; c < r.ncomp; ++c) r.values[(c * ys.size() + iy) * r.xs.size() + ix] = v[c];
    }
  return r;
}

}  // namespace edgewave
