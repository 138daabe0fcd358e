#pragma once

#include <cmath>
#include <memory>
#include <optional>
#include <ostream>
#include <string>
#include <vector>

#include "edgewave/core/error.hpp"
#include "edgewave/geometry/rectification.hpp"
#include "edgewave/pde/fft.hpp"
#include "edgewave/pde/solvers.hpp"
#include "edgewave/spectral/branches.hpp"
#include "edgewave/wavepacket/field.hpp"

namespace edgewave {

/// Default time step of the residual's finite difference: 1e−4√ε for Dirac,
/// 1e−3√ε for the second derivative of Klein-Gordon.
inline double default_residual_dt(const ModelSpec& model) {
  return (model.model == Model::Dirac ? 1e-4 : 1e-3) * std::sqrt(model.epsilon);
}

/// ‖ε^{−q/2} L u(t)‖ / ‖u(t)‖ with spectral spatial derivatives and fourth-order
/// central differences in time. `provider(t)` returns the field at time t.
template <class Provider>
double residual(const ModelSpec& model, const WallSamples& wall, Provider&& provider, double t,
                std::optional<double> fd_dt = std::nullopt) {
  model.validate();
  const double h = fd_dt ? *fd_dt : default_residual_dt(model);
  const double eps = model.epsilon;
  const Field u = provider(t);
  const Field um2 = provider(t - 2 * h), um1 = provider(t - h), up1 = provider(t + h), up2 = provider(t + 2 * h);
  for (const Field* f : {&um2, &um1, &up1, &up2})
    if (!f->same_layout(u)) fail(ErrorCode::GridMismatch, "provider returned fields on different grids");
  const Grid& g = u.grid;
  if (wall.kappa.size() != g.size()) fail(ErrorCode::GridMismatch, "wall samples do not match the field grid");
  const std::size_t n = g.size();
  SpectralOps ops(g);
  std::vector<cplx> lu(n * u.ncomp);

  if (model.model == Model::Dirac) {
    if (u.ncomp != 2) fail(ErrorCode::GridMismatch, "Dirac residual needs a two-component field");
    std::vector<cplx> dx0(n), dy0(n), dx1(n), dy1(n);
    ops.gradient(u.component(0), dx0.data(), dy0.data());
    ops.gradient(u.component(1), dx1.data(), dy1.data());
    for (int c = 0; c < 2; ++c) {
      for (std::size_t i = 0; i < n; ++i) {
        const std::size_t k = c * n + i;
        const cplx dt = (um2.data[k] - 8.0 * um1.data[k] + 8.0 * up1.data[k] - up2.data[k]) / (12.0 * h);
        // εD_t u + ε(σ₁D_x + σ₂D_y)u + κσ₃u, D = −i∂
        cplx sigma;
        if (c == 0) sigma = dx1[i] - I * dy1[i];
        else sigma = dx0[i] + I * dy0[i];
        const double sgn = c == 0 ? 1.0 : -1.0;
        lu[k] = -I * eps * (dt + sigma) + sgn * wall.kappa[i] * u.data[k];
      }
    }
  } else {
    if (wall.shift.size() != n) fail(ErrorCode::GridMismatch, "wall samples do not match the field grid");
    std::vector<cplx> lap(n);
    ops.laplacian(u.component(0), lap.data());
    for (std::size_t i = 0; i < n; ++i) {
      const cplx dtt =
          (-um2.data[i] + 16.0 * um1.data[i] - 30.0 * u.data[i] + 16.0 * up1.data[i] - up2.data[i]) / (12.0 * h * h);
      const double w = wall.kappa[i] * wall.kappa[i] - eps * wall.shift[i];
      lu[i] = eps * eps * (dtt - lap[i]) + w * u.data[i];
    }
  }
  double num = 0.0;
  for (const auto& v : lu) num += std::norm(v);
  num = std::sqrt(num * g.hx * g.hy);
  const double den = u.l2_norm();
  if (den == 0.0) fail(ErrorCode::ConfigError, "residual of a zero field");
  return num / std::pow(eps, 0.5 * model.q) / den;
}

/// Dirac: L² norm of the spinor. Klein-Gordon: the stabilized surrogate
/// (‖ε∂_t u‖² + ‖ε∇u‖² + ‖|κ|u‖² + ε‖u‖²)^{1/2}.
class EnergyNorm {
 public:
  static EnergyNorm dirac() { return EnergyNorm(); }

  static EnergyNorm klein_gordon(const Grid& g, const std::vector<double>& kappa, double epsilon) {
    if (kappa.size() != g.size()) fail(ErrorCode::GridMismatch, "kappa samples do not match the grid");
    EnergyNorm n;
    n.kg_ = true;
    n.grid_ = g;
    n.eps_ = epsilon;
    n.abs_kappa_.resize(kappa.size());
    for (std::size_t i = 0; i < kappa.size(); ++i) n.abs_kappa_[i] = std::abs(kappa[i]);
    n.ops_ = std::make_shared<SpectralOps>(g);
    return n;
  }

  bool klein_gordon() const { return kg_; }
  std::string label() const { return kg_ ? "kg_energy_surrogate" : "l2"; }

  /// `p` is ε∂_t u; it is ignored for Dirac and optional for Klein-Gordon.
  double operator()(const Field& u, const Field* p = nullptr) const {
    if (!kg_) return u.l2_norm();
    if (!(u.grid == grid_) || (p && !(p->grid == grid_)))
      fail(ErrorCode::GridMismatch, "field does not match the energy-norm grid");
    const std::size_t n = grid_.size();
    std::vector<cplx> dx(n), dy(n);
    ops_->gradient(u.component(0), dx.data(), dy.data());
    const cplx* v = u.component(0);
    double s = 0.0;
    for (std::size_t i = 0; i < n; ++i) {
      s += eps_ * eps_ * (std::norm(dx[i]) + std::norm(dy[i]));
      s += (abs_kappa_[i] * abs_kappa_[i] + eps_) * std::norm(v[i]);
      if (p) s += std::norm(p->data[i]);
    }
    return std::sqrt(s * grid_.hx * grid_.hy);
  }

 private:
  bool kg_ = false;
  Grid grid_;
  double eps_ = 0.0;
  std::vector<double> abs_kappa_;
  std::shared_ptr<SpectralOps> ops_;
};

inline Field difference(const Field& a, const Field& b) {
  if (!a.same_layout(b)) fail(ErrorCode::GridMismatch, "fields live on different grids");
  Field d = a;
  for (std::size_t i = 0; i < d.data.size(); ++i) d.data[i] -= b.data[i];
  return d;
}

/// norm(u_numeric − u_asymptotic) / norm(u_numeric).
inline double compare(const Field& numeric, const Field& asymptotic, const EnergyNorm& norm) {
  if (!numeric.same_layout(asymptotic)) fail(ErrorCode::GridMismatch, "fields live on different grids");
  if (std::abs(numeric.time - asymptotic.time) > 1e-12 * (1.0 + std::abs(numeric.time)))
    fail(ErrorCode::GridMismatch, "fields are at different times");
  const double den = norm(numeric);
  if (den == 0.0) return norm(asymptotic) == 0.0 ? 0.0 : INFINITY;
  return norm(difference(numeric, asymptotic)) / den;
}

inline double compare(const KGState& numeric, const KGState& asymptotic, const EnergyNorm& norm) {
  if (!numeric.u.same_layout(asymptotic.u) || !numeric.p.same_layout(asymptotic.p))
    fail(ErrorCode::GridMismatch, "fields live on different grids");
  const Field du = difference(numeric.u, asymptotic.u), dp = difference(numeric.p, asymptotic.p);
  const double den = norm(numeric.u, &numeric.p);
  if (den == 0.0) return 0.0;
  return norm(du, &dp) / den;
}

/// Time-series observables of a field relative to Γ.
struct Observables {
  double time = 0.0;
  double norm = 0.0;
  double energy = 0.0;
  double center = 0.0;        ///< |u|²-weighted mean of x̃ over the tube
  double spread = 0.0;        ///< |u|²-weighted RMS of ỹ over the tube
  double max_amplitude = 0.0;
  double tube_fraction = 0.0; ///< share of ‖u‖² inside the tube
};

/// For closed Γ, x̃ is unwrapped into [reference − L/2, reference + L/2).
inline Observables observe(const Field& u, const RectificationMap& map, double energy, double reference = 0.0) {
  Observables o;
  o.time = u.time;
  o.norm = u.l2_norm();
  o.energy = energy;
  o.max_amplitude = u.max_abs();
  const Grid& g = u.grid;
  const LevelCurve& c = map.curve();
  const double L = c.closed() ? c.total_length() : 0.0;
  const double floor = 1e-14 * o.max_amplitude * o.max_amplitude;
  double mass = 0.0, in = 0.0, sx = 0.0, sy2 = 0.0;
  for (std::size_t iy = 0; iy < g.ny; ++iy)
    for (std::size_t ix = 0; ix < g.nx; ++ix) {
      double w = 0.0;
      for (int k = 0; k < u.ncomp; ++k) w += std::norm(u.at(k, ix, iy));
      mass += w;
      if (w <= floor) continue;
      const auto tc = map.try_inverse({g.x(ix), g.y(iy)});
      if (!tc) continue;
      double s = tc->s;
      if (c.closed()) s -= L * std::floor((s - (reference - 0.5 * L)) / L);
      in += w;
      sx += w * s;
      sy2 += w * tc->yt * tc->yt;
    }
  if (in > 0.0) {
    o.center = sx / in;
    o.spread = std::sqrt(sy2 / in);
  }
  o.tube_fraction = mass > 0.0 ? in / mass : 0.0;
  return o;
}

inline void write_observables_csv(const std::vector<Observables>& rows, std::ostream& os) {
  os << "t,norm,energy,center,spread,max_amplitude,tube_fraction\n";
  char buf[256];
  for (const auto& r : rows) {
    std::snprintf(buf, sizeof buf, "%.9g,%.9g,%.9g,%.9g,%.9g,%.9g,%.9g\n", r.time, r.norm, r.energy, r.center,
                  r.spread, r.max_amplitude, r.tube_fraction);
    os << buf;
  }
}

}  // namespace edgewave
