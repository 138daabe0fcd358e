#pragma once

#include <algorithm>
#include <cmath>
#include <map>
#include <vector>

#include "edgewave/core/error.hpp"
#include "edgewave/core/parallel.hpp"
#include "edgewave/geometry/domain_wall.hpp"
#include "edgewave/pde/fft.hpp"
#include "edgewave/spectral/branches.hpp"
#include "edgewave/wavepacket/field.hpp"

namespace edgewave {

/// κ and the KG shift m = |∇κ| sampled at the grid nodes.
struct WallSamples {
  std::vector<double> kappa;
  std::vector<double> shift;

  static WallSamples sample(const DomainWall& wall, const Grid& g) {
    WallSamples w;
    w.kappa.resize(g.size());
    w.shift.resize(g.size());
    parallel_for(0, g.ny, [&](std::size_t iy) {
      for (std::size_t ix = 0; ix < g.nx; ++ix) {
        const auto j = wall.eval({g.x(ix), g.y(iy)});
        w.kappa[iy * g.nx + ix] = j.v;
        w.shift[iy * g.nx + ix] = norm(j.g);
      }
    });
    return w;
  }
};

enum class Scheme { StrangSplitDirac, SpectralLeapfrogKG };

inline const char* to_string(Scheme s) {
  return s == Scheme::StrangSplitDirac ? "StrangSplitDirac" : "SpectralLeapfrogKG";
}

struct SolverConfig {
  ModelSpec model;
  DomainWall wall;
  Grid grid;
  double dt = 1e-3;
  double t_end = 1.0;
  Scheme scheme = Scheme::StrangSplitDirac;
  /// Dirac only: Yoshida composition of three Strang steps.
  bool fourth_order = false;

  void validate() const {
    model.validate();
    if ((model.model == Model::Dirac) != (scheme == Scheme::StrangSplitDirac))
      fail(ErrorCode::ConfigError, "scheme does not match the model");
    if (grid.nx < 4 || grid.ny < 4) fail(ErrorCode::ConfigError, "grid too small");
    const double h = std::max(grid.hx, grid.hy);
    if (h > std::sqrt(model.epsilon) / 8.0 * (1.0 + 1e-12))
      fail(ErrorCode::ConfigError, "grid must resolve sqrt(epsilon) with at least 8 points");
    if (!(dt > 0.0)) fail(ErrorCode::ConfigError, "dt must be positive");
  }
};

/// Strang splitting for iε∂_t u = ε(D_xσ₁ + D_yσ₂)u + κσ₃u on a periodic grid.
/// Each substep is unitary; negative dt runs backwards.
class DiracSolver {
 public:
  DiracSolver(const Grid& grid, std::vector<double> kappa, double epsilon, bool fourth_order = false)
      : grid_(grid), kappa_(std::move(kappa)), eps_(epsilon), fourth_(fourth_order), fft_(grid.nx, grid.ny),
        kx_(wavenumbers(grid.nx, grid.hx)), ky_(wavenumbers(grid.ny, grid.hy)) {
    if (kappa_.size() != grid.size()) fail(ErrorCode::GridMismatch, "kappa samples do not match the grid");
    if (!(eps_ > 0.0)) fail(ErrorCode::ConfigError, "epsilon must be positive");
  }

  DiracSolver(const SolverConfig& cfg)
      : DiracSolver(cfg.grid, WallSamples::sample(cfg.wall, cfg.grid).kappa, cfg.model.epsilon, cfg.fourth_order) {
    cfg.validate();
  }

  const Grid& grid() const { return grid_; }
  double epsilon() const { return eps_; }
  const std::vector<double>& kappa() const { return kappa_; }

  void step(Field& u, double dt) {
    check(u);
    if (!fourth_) {
      strang(u, dt);
    } else {
      const double c = std::cbrt(2.0);
      const double w1 = 1.0 / (2.0 - c), w0 = -c / (2.0 - c);
      strang(u, w1 * dt);
      strang(u, w0 * dt);
      strang(u, w1 * dt);
    }
    u.time += dt;
  }

  /// Steps from u.time to t_end with a uniform step no longer than |dt|.
  void advance(Field& u, double t_end, double dt) {
    const double span = t_end - u.time;
    if (span == 0.0) return;
    const auto n = static_cast<long>(std::ceil(std::abs(span) / std::abs(dt) - 1e-9));
    const double h = span / static_cast<double>(n);
    const double t0 = u.time;
    for (long k = 0; k < n; ++k) step(u, h);
    u.time = t0 + span;
  }

  /// Re⟨u, Hu⟩ with H = ε(D_xσ₁ + D_yσ₂) + κσ₃.
  double energy(const Field& u) {
    check(u);
    const std::size_t n = grid_.size();
    std::vector<cplx> a(u.component(0), u.component(0) + n), b(u.component(1), u.component(1) + n);
    fft_.forward(a.data());
    fft_.forward(b.data());
    double kin = 0.0;
    for (std::size_t iy = 0; iy < grid_.ny; ++iy)
      for (std::size_t ix = 0; ix < grid_.nx; ++ix) {
        const std::size_t i = iy * grid_.nx + ix;
        const cplx off(kx_[ix], -ky_[iy]);  // (σ₁k_x + σ₂k_y)₀₁
        kin += 2.0 * std::real(std::conj(a[i]) * off * b[i]);
      }
    kin *= eps_ / static_cast<double>(n);
    double mass = 0.0;
    for (std::size_t i = 0; i < n; ++i) mass += kappa_[i] * (std::norm(u.data[i]) - std::norm(u.data[n + i]));
    return (kin + mass) * grid_.hx * grid_.hy;
  }

 private:
  struct Tables {
    std::vector<cplx> mass_half;  // e^{−iκ dt/(2ε)}
    std::vector<double> c, s;     // cos(|k|dt), sin(|k|dt)/|k|
  };

  void check(const Field& u) const {
    if (u.ncomp != 2 || !(u.grid == grid_)) fail(ErrorCode::GridMismatch, "Dirac state does not match the solver grid");
  }

  const Tables& tables(double dt) {
    auto it = cache_.find(dt);
    if (it != cache_.end()) return it->second;
    if (cache_.size() > 8) cache_.clear();
    Tables t;
    const std::size_t n = grid_.size();
    t.mass_half.resize(n);
    for (std::size_t i = 0; i < n; ++i) t.mass_half[i] = std::polar(1.0, -0.5 * dt * kappa_[i] / eps_);
    t.c.resize(n);
    t.s.resize(n);
    for (std::size_t iy = 0; iy < grid_.ny; ++iy)
      for (std::size_t ix = 0; ix < grid_.nx; ++ix) {
        const std::size_t i = iy * grid_.nx + ix;
        const double k = std::hypot(kx_[ix], ky_[iy]);
        t.c[i] = std::cos(k * dt);
        t.s[i] = k > 0.0 ? std::sin(k * dt) / k : dt;
      }
    return cache_.emplace(dt, std::move(t)).first->second;
  }

  void mass(Field& u, const Tables& t) {
    cplx* a = u.component(0);
    cplx* b = u.component(1);
    parallel_for(0, grid_.ny, [&](std::size_t iy) {
      for (std::size_t i = iy * grid_.nx; i < (iy + 1) * grid_.nx; ++i) {
        a[i] *= t.mass_half[i];
        b[i] *= std::conj(t.mass_half[i]);
      }
    });
  }

  void strang(Field& u, double dt) {
    const Tables& t = tables(dt);
    mass(u, t);
    cplx* a = u.component(0);
    cplx* b = u.component(1);
    fft_.forward(a);
    fft_.forward(b);
    const double scale = 1.0 / static_cast<double>(grid_.size());
    // exp(−i dt (k_xσ₁ + k_yσ₂)) = cos(|k|dt) − i sin(|k|dt)/|k| (k_xσ₁ + k_yσ₂)
    parallel_for(0, grid_.ny, [&](std::size_t iy) {
      for (std::size_t ix = 0; ix < grid_.nx; ++ix) {
        const std::size_t i = iy * grid_.nx + ix;
        const cplx up(kx_[ix], -ky_[iy]), dn(kx_[ix], ky_[iy]);
        const cplx is(0.0, t.s[i]);
        const cplx na = t.c[i] * a[i] - is * up * b[i];
        const cplx nb = t.c[i] * b[i] - is * dn * a[i];
        a[i] = na * scale;
        b[i] = nb * scale;
      }
    });
    fft_.backward(a);
    fft_.backward(b);
    mass(u, t);
  }

  Grid grid_;
  std::vector<double> kappa_;
  double eps_;
  bool fourth_;
  FFT2 fft_;
  std::vector<double> kx_, ky_;
  std::map<double, Tables> cache_;
};

/// Klein-Gordon state: u and p = ε∂_t u on the same grid.
struct KGState {
  Field u;
  Field p;
  double time() const { return u.time; }
};

/// Störmer-Verlet for ε²∂²_t u = ε²Δu − Wu, W = κ² − ε·m, in the variables
/// (u, p = ε∂_t u). Δ is applied spectrally.
class KGSolver {
 public:
  KGSolver(const Grid& grid, const std::vector<double>& kappa, const std::vector<double>& shift, double epsilon)
      : grid_(grid), eps_(epsilon), ops_(grid), w_(grid.size()), kx2_(wavenumbers_squared(grid.nx, grid.hx)),
        ky2_(wavenumbers_squared(grid.ny, grid.hy)) {
    if (kappa.size() != grid.size() || shift.size() != grid.size())
      fail(ErrorCode::GridMismatch, "wall samples do not match the grid");
    if (!(eps_ > 0.0)) fail(ErrorCode::ConfigError, "epsilon must be positive");
    for (std::size_t i = 0; i < w_.size(); ++i) {
      w_[i] = kappa[i] * kappa[i] - eps_ * shift[i];
      abs_kappa_.push_back(std::abs(kappa[i]));
    }
  }

  explicit KGSolver(const SolverConfig& cfg) : KGSolver(cfg.grid, WallSamples::sample(cfg.wall, cfg.grid), cfg.model.epsilon) {
    cfg.validate();
    require_stable(cfg.dt);
  }

  KGSolver(const Grid& grid, const WallSamples& w, double epsilon) : KGSolver(grid, w.kappa, w.shift, epsilon) {}

  const Grid& grid() const { return grid_; }
  double epsilon() const { return eps_; }
  const std::vector<double>& potential() const { return w_; }
  const std::vector<double>& abs_kappa() const { return abs_kappa_; }

  /// 2ε/√(ε²k²_max + max W).
  double stability_limit() const {
    const double k2 = *std::max_element(kx2_.begin(), kx2_.end()) + *std::max_element(ky2_.begin(), ky2_.end());
    const double wmax = std::max(0.0, *std::max_element(w_.begin(), w_.end()));
    return 2.0 * eps_ / std::sqrt(eps_ * eps_ * k2 + wmax);
  }

  void require_stable(double dt) const {
    if (!(std::abs(dt) < stability_limit()))
      fail(ErrorCode::UnstableStep, "dt exceeds the leapfrog stability limit", {dt, stability_limit()});
  }

  void step(KGState& s, double dt) {
    check(s);
    kick(s, 0.5 * dt);
    const double f = dt / eps_;
    cplx* u = s.u.component(0);
    const cplx* p = s.p.component(0);
    for (std::size_t i = 0; i < grid_.size(); ++i) u[i] += f * p[i];
    kick(s, 0.5 * dt);
    s.u.time += dt;
    s.p.time = s.u.time;
  }

  /// Steps to t_end; throws UnstableStep if ‖(u, p)‖ grows more than tenfold.
  void advance(KGState& s, double t_end, double dt) {
    require_stable(dt);
    const double span = t_end - s.time();
    if (span == 0.0) return;
    const auto n = static_cast<long>(std::ceil(std::abs(span) / std::abs(dt) - 1e-9));
    const double h = span / static_cast<double>(n);
    const double t0 = s.time();
    const double start = size(s);
    for (long k = 0; k < n; ++k) {
      step(s, h);
      if (!(size(s) <= 10.0 * start + 1e-300))
        fail(ErrorCode::UnstableStep, "Klein-Gordon solution grew more than tenfold", {s.time()});
    }
    s.u.time = s.p.time = t0 + span;
  }

  /// ‖p‖² + ‖ε∇u‖² + ⟨Wu, u⟩, conserved by the continuum equation.
  double energy(const KGState& s) { return energy_form(s, 0.0); }

  /// The quadratic form conserved exactly by a Verlet step of size dt:
  /// ‖p‖² + ⟨u, K(1 − dt²K/(4ε²))u⟩ with K = −ε²Δ + W.
  double discrete_energy(const KGState& s, double dt) { return energy_form(s, dt); }

 private:
  void check(const KGState& s) const {
    if (s.u.ncomp != 1 || s.p.ncomp != 1 || !(s.u.grid == grid_) || !(s.p.grid == grid_))
      fail(ErrorCode::GridMismatch, "Klein-Gordon state does not match the solver grid");
  }

  static double size(const KGState& s) { return std::hypot(s.u.l2_norm(), s.p.l2_norm()); }

  /// out = K u.
  void apply_k(const cplx* u, cplx* out) {
    ops_.laplacian(u, out);
    const double e2 = eps_ * eps_;
    for (std::size_t i = 0; i < grid_.size(); ++i) out[i] = -e2 * out[i] + w_[i] * u[i];
  }

  void kick(KGState& s, double half) {
    force_.resize(grid_.size());
    apply_k(s.u.component(0), force_.data());
    cplx* p = s.p.component(0);
    const double f = half / eps_;
    for (std::size_t i = 0; i < grid_.size(); ++i) p[i] -= f * force_[i];
  }

  double energy_form(const KGState& s, double dt) {
    check(s);
    const std::size_t n = grid_.size();
    std::vector<cplx> ku(n);
    apply_k(s.u.component(0), ku.data());
    const cplx* u = s.u.component(0);
    const cplx* p = s.p.component(0);
    double e = 0.0;
    for (std::size_t i = 0; i < n; ++i) e += std::norm(p[i]) + std::real(std::conj(u[i]) * ku[i]);
    if (dt != 0.0) {
      double kk = 0.0;
      for (std::size_t i = 0; i < n; ++i) kk += std::norm(ku[i]);
      e -= dt * dt / (4.0 * eps_ * eps_) * kk;
    }
    return e * grid_.hx * grid_.hy;
  }

  Grid grid_;
  double eps_;
  SpectralOps ops_;
  std::vector<double> w_, abs_kappa_;
  std::vector<double> kx2_, ky2_;
  std::vector<cplx> force_;
};

}  // namespace edgewave
