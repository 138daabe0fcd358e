#pragma once

#include <algorithm>
#include <chrono>
#include <cmath>
#include <filesystem>
#include <fstream>
#include <memory>
#include <random>
#include <string>
#include <vector>

#include "edgewave/core/error.hpp"
#include "edgewave/core/quadrature.hpp"
#include "edgewave/eikonal/phase.hpp"
#include "edgewave/harness/config.hpp"
#include "edgewave/harness/properties.hpp"
#include "edgewave/harness/report.hpp"
#include "edgewave/harness/scene.hpp"
#include "edgewave/pde/diagnostics.hpp"
#include "edgewave/pde/solvers.hpp"
#include "edgewave/wavepacket/ansatz.hpp"
#include "edgewave/wavepacket/field.hpp"
#include "edgewave/wavepacket/relativistic.hpp"
#include "edgewave/wavepacket/stationary_phase.hpp"

namespace edgewave {

struct ExperimentResult {
  std::vector<ReportRow> rows;    ///< deterministic rows, written to report.csv
  std::vector<ReportRow> timing;  ///< wall-clock rows, written to timing.csv
  std::vector<std::string> artifacts;

  bool passed() const {
    auto ok = [](const ReportRow& r) { return r.pass; };
    return std::all_of(rows.begin(), rows.end(), ok) && std::all_of(timing.begin(), timing.end(), ok);
  }

  std::vector<ReportRow> all_rows() const {
    std::vector<ReportRow> out = rows;
    out.insert(out.end(), timing.begin(), timing.end());
    return out;
  }
};

namespace detail {

class Stopwatch {
 public:
  double seconds() const { return std::chrono::duration<double>(std::chrono::steady_clock::now() - start_).count(); }

 private:
  std::chrono::steady_clock::time_point start_ = std::chrono::steady_clock::now();
};

/// Least-squares slope of y against x.
inline double fit_slope(const std::vector<double>& x, const std::vector<double>& y) {
  const double n = static_cast<double>(x.size());
  double sx = 0, sy = 0, sxx = 0, sxy = 0;
  for (std::size_t i = 0; i < x.size(); ++i) {
    sx += x[i];
    sy += y[i];
    sxx += x[i] * x[i];
    sxy += x[i] * y[i];
  }
  return (n * sxy - sx * sy) / (n * sxx - sx * sx);
}

/// Tube half-width: min(eta_max, eta_per_sqrt_eps·√ε).
inline double tube_eta(const ExperimentConfig& c, double eps) {
  return std::min(c.param("eta_max", 0.6), c.param("eta_per_sqrt_eps", 7.5) * std::sqrt(eps));
}

inline double grid_step(const ExperimentConfig& c, double eps) { return std::sqrt(eps) / c.grid.points_per_sqrt_eps; }
inline double grid_padding(const ExperimentConfig& c, double eps) { return c.grid.padding * std::sqrt(eps); }

inline double dirac_dt(const ExperimentConfig& c, double eps) {
  return c.solver.dt_over_eps > 0.0 ? c.solver.dt_over_eps * eps : c.param("dt", 4e-3);
}

/// FFT grid on `box`; ResourceLimit beyond the configured point budget.
inline Grid checked_grid(const ExperimentConfig& c, const Rect& box, double h) {
  const Grid g = fft_grid(box, h);
  const double budget = c.param("max_grid_points", 2048.0 * 2048.0);
  if (static_cast<double>(g.size()) > budget)
    fail(ErrorCode::ResourceLimit, "grid exceeds the memory budget (params.max_grid_points)",
         {static_cast<double>(g.nx), static_cast<double>(g.ny), budget});
  return g;
}

inline Interval phase_range(const LevelCurve& curve, double x0) {
  if (curve.closed()) {
    const double half = 0.5 * curve.total_length() + 1.0;
    return {x0 - half, x0 + half};
  }
  return {curve.s_min(), curve.s_max()};
}

inline WavepacketSpec make_spec(const Scene& sc, const ModelSpec& model, const BranchSpec& b, double x0,
                                const Envelope& env) {
  auto ph = std::make_shared<const PhaseSolution>(b, sc.curve, x0, env.support(), phase_range(*sc.curve, x0));
  WavepacketSpec spec{model, b, ph, env};
  spec.validate();
  return spec;
}

inline Scene flat_scene(const ExperimentConfig& c, const char* id) {
  Scene sc = Scene::build(c.wall);
  if (sc.curve->closed()) fail(ErrorCode::ConfigError, std::string("wall.kind: ") + id + " needs an open interface");
  return sc;
}

inline void save_field(const Field& f, const ExperimentConfig& c, const std::string& name, ExperimentResult& r) {
  const std::string path = (std::filesystem::path(c.output_dir) / name).string();
  write_field(f, path);
  r.artifacts.push_back(path);
}

/// ε^{−1/2} ∫ e^{iG/√ε} f(ξ) Ψ_ξ(ỹ/√ε) dξ at one point, by adaptive Gauss-Kronrod.
inline Spinor quadrature_eval(const WavepacketSpec& spec, double t, double x, double yt, double tol = 1e-11) {
  const PhaseSolution& ph = *spec.phase;
  const double se = std::sqrt(spec.epsilon());
  const double mu = ph.slope(x);
  const Interval w = spec.envelope.window();
  Spinor out{};
  for (int comp = 0; comp < spec.components(); ++comp) {
    auto integrand = [&](double xi) {
      const TransverseProfile prof(spec.branch, ph.k(x, xi), mu);
      const double g = ph.eval(t, x, xi).G;
      return std::polar(spec.envelope(xi) / se, g / se) * prof.components(yt / se)[comp];
    };
    out[comp] = quad::adaptive(integrand, w.lo, w.hi, tol);
  }
  return out;
}

/// Largest |⟨φ_c, u⟩|/‖u‖ over m = 0 profiles φ_c (spinor (1, −1)/√2 in the
/// tube frame) centered at x̃ = c with the given longitudinal shape.
inline double max_relativistic_overlap(const Field& u, const RectificationMap& map, const LongitudinalProfile& prof,
                                       double eps, const std::vector<double>& centers) {
  struct Node {
    double s, chi, trans;
    cplx w0, w1;
  };
  const Grid& g = u.grid;
  const LevelCurve& c = map.curve();
  const double se = std::sqrt(eps);
  std::vector<Node> nodes;
  for (std::size_t iy = 0; iy < g.ny; ++iy)
    for (std::size_t ix = 0; ix < g.nx; ++ix) {
      const auto tc = map.try_inverse({g.x(ix), g.y(iy)});
      if (!tc) continue;
      const double chi = tube_cutoff(tc->yt / map.eta());
      if (chi == 0.0) continue;
      const double mu = c.slope(tc->s);
      const double trans = std::pow(mu / pi, 0.25) * std::exp(-0.5 * mu * tc->yt * tc->yt / eps) / se;
      const double th = c.frame_angle(tc->s);
      nodes.push_back({tc->s, chi, trans, u.at(0, ix, iy) * std::polar(1.0, 0.5 * th),
                       u.at(1, ix, iy) * std::polar(1.0, -0.5 * th)});
    }
  const double L = c.closed() ? c.total_length() : 0.0;
  const double reach = 10.0 * prof.width * se;
  const double norm_u = u.l2_norm();
  double best = 0.0;
  for (double ctr : centers) {
    cplx sum = 0.0;
    for (const Node& n : nodes) {
      double s = n.s;
      double turns = 0.0;
      if (c.closed()) {
        turns = std::floor((s - (ctr - 0.5 * L)) / L);
        s -= turns * L;
      }
      if (std::abs(s - ctr) > reach) continue;
      // the frame angle advances by the total turning per period
      const double half = -0.5 * turns * c.total_turning();
      const cplx w0 = n.w0 * std::polar(1.0, half), w1 = n.w1 * std::polar(1.0, -half);
      const cplx phi = std::conj(prof((s - ctr) / se)) * n.chi * n.trans / std::sqrt(2.0);
      sum += phi * (w0 - w1);
    }
    best = std::max(best, std::abs(sum));
  }
  return best * g.hx * g.hy / norm_u;
}

inline std::vector<double> node_range(double lo, double hi, double h) {
  std::vector<double> out;
  for (double x = lo; x <= hi + 1e-12; x += h) out.push_back(x);
  return out;
}

}  // namespace detail

/// Flat-wall residuals of u_0, u_{1,±} and the KG modes u_±.
inline void run_e1(const ExperimentConfig& c, ExperimentResult& r) {
  const detail::Stopwatch clock;
  const Scene sc = detail::flat_scene(c, "E1");
  const double t = c.times.front();
  const double width = c.param("profile_width", 1.0);
  const double half_x = c.param("half_length", 2.5);
  for (double eps : c.epsilons) {
    const double se = std::sqrt(eps), pad = detail::grid_padding(c, eps);
    const Grid grid = detail::checked_grid(c, {c.x0 - half_x, c.x0 + half_x, -pad, pad}, detail::grid_step(c, eps));
    const RectificationMap map = sc.map(detail::tube_eta(c, eps));
    const auto ws = WallSamples::sample(sc.wall, grid);
    const auto dirac = ModelSpec::dirac(eps);

    const RelativisticMode u0(BranchSpec::dirac_relativistic(), sc.curve, {width, 0.0}, c.x0, eps);
    auto rel = [&](const RelativisticMode& m) { return [&](double s) { return relativistic_field(m, map, grid, s); }; };
    r.rows.push_back(ReportRow::check("E1", eps, t, "residual_u0", residual(dirac, ws, rel(u0), t),
                                      Tolerance::below(1e-7)));
    detail::save_field(relativistic_field(u0, map, grid, t), c, "e1_u0.bin", r);

    // lattice ξ_j = 2π√ε j/L_x keeps u_{1,±} periodic on the box; the x̃ table sits on the grid columns
    const Envelope env = c.envelope.build();
    AssemblyOptions opt;
    opt.rule = lattice_rule(env.window().lo, env.window().hi, 2.0 * pi * se / grid.lx());
    std::vector<double> nodes;
    for (long i = -3; i < static_cast<long>(grid.nx) + 3; ++i) nodes.push_back(grid.x_min + static_cast<double>(i) * grid.hx);
    for (int sign : {1, -1}) {
      const auto spec = detail::make_spec(sc, dirac, BranchSpec::create(Model::Dirac, 1, sign), c.x0, env);
      const double res = residual(dirac, ws, [&](double s) { return dispersive_field(spec, map, grid, s, opt, c.x0, nodes); }, t);
      r.rows.push_back(ReportRow::check("E1", eps, t, sign > 0 ? "residual_u1_plus" : "residual_u1_minus", res,
                                        Tolerance::below(1e-7)));
    }

    const auto kg = ModelSpec::klein_gordon(eps);
    for (int sign : {1, -1}) {
      const RelativisticMode m(BranchSpec::create(Model::KleinGordon, 0, sign), sc.curve, {width, 0.0}, c.x0, eps);
      r.rows.push_back(ReportRow::check("E1", eps, t, sign > 0 ? "residual_kg_plus" : "residual_kg_minus",
                                        residual(kg, ws, rel(m), t), Tolerance::below(1e-7)));
    }
  }
  r.timing.push_back(ReportRow::check("E1", NAN, NAN, "runtime_s", clock.seconds(), Tolerance::below(60.0)));
}

/// Circle wall: J = 0 packets against the Dirac solver, error ratios across ε.
inline void run_e2(const ExperimentConfig& c, ExperimentResult& r) {
  const detail::Stopwatch clock;
  const Scene sc = Scene::build(c.wall);
  const LevelCurve& curve = *sc.curve;
  if (!curve.closed()) fail(ErrorCode::ConfigError, "wall.kind: E2 needs a closed interface");
  const double t_end = c.times.back();
  const Envelope env = c.envelope.build();
  const BranchSpec disp = c.branch();
  if (disp.relativistic()) fail(ErrorCode::ConfigError, "branch.m: E2 compares a dispersive branch, m must be >= 1");
  const LongitudinalProfile prof{c.param("profile_width", 1.0), 0.0};
  std::vector<double> e_rel, e_disp;
  for (double eps : c.epsilons) {
    const RectificationMap map = sc.map(detail::tube_eta(c, eps));
    const Rect box = padded(curve_box(curve, 0.0, curve.total_length()), detail::grid_padding(c, eps));
    const Grid grid = detail::checked_grid(c, box, detail::grid_step(c, eps));
    const auto ws = WallSamples::sample(sc.wall, grid);
    DiracSolver solver(grid, ws.kappa, eps, c.solver.fourth_order);
    const double dt = detail::dirac_dt(c, eps);

    const RelativisticMode mode(BranchSpec::dirac_relativistic(), sc.curve, prof, c.x0, eps);
    Field u = relativistic_field(mode, map, grid, 0.0, false, c.x0);
    solver.advance(u, t_end, dt);
    const Field ur = relativistic_field(mode, map, grid, t_end, false, mode.center(t_end));
    e_rel.push_back(compare(u, ur, EnergyNorm::dirac()));
    r.rows.push_back(ReportRow::measure("E2", eps, t_end, "rel_error_relativistic", e_rel.back()));

    const auto spec = detail::make_spec(sc, ModelSpec::dirac(eps), disp, c.x0, env);
    Field v = dispersive_field(spec, map, grid, 0.0, {}, c.x0);
    solver.advance(v, t_end, dt);
    const Field vr = dispersive_field(spec, map, grid, t_end, {}, c.x0);
    e_disp.push_back(compare(v, vr, EnergyNorm::dirac()));
    r.rows.push_back(ReportRow::measure("E2", eps, t_end, "rel_error_dispersive", e_disp.back()));
    if (eps == c.epsilons.front()) detail::save_field(v, c, "e2_dispersive_solver.bin", r);
  }
  const auto band = Tolerance::range(c.param("ratio_lo", 1.5), c.param("ratio_hi", 3.0));
  for (std::size_t i = 0; i + 1 < c.epsilons.size(); ++i) {
    const double eps = c.epsilons[i + 1];
    r.rows.push_back(ReportRow::check("E2", eps, t_end, "ratio_relativistic", e_rel[i] / e_rel[i + 1], band));
    r.rows.push_back(ReportRow::check("E2", eps, t_end, "ratio_dispersive", e_disp[i] / e_disp[i + 1], band));
  }
  r.timing.push_back(ReportRow::check("E2", NAN, NAN, "runtime_s", clock.seconds(), Tolerance::below(600.0)));
}

/// max|u| against t (log-log slope) and against ε (ratio between ε and 2ε).
inline void run_e3(const ExperimentConfig& c, ExperimentResult& r) {
  const Scene sc = detail::flat_scene(c, "E3");
  const double eps = c.epsilons.front();
  const double t_max = *std::max_element(c.times.begin(), c.times.end());
  const double t_pref = c.param("prefactor_t", 1.0);
  auto peaks = [&](double e, const std::vector<double>& times) {
    const double se = std::sqrt(e);
    const auto spec = detail::make_spec(sc, ModelSpec::dirac(e), c.branch(), c.x0, c.envelope.build());
    const Interval vr = spec.phase->valid_range();
    const auto xs = detail::node_range(std::max(vr.lo, c.x0 - t_max - 0.5), std::min(vr.hi, c.x0 + t_max + 0.5), se / 4);
    const auto ys = detail::node_range(-4 * se, 4 * se, se / 32);
    return max_amplitude_decay(spec, times, xs, ys);
  };
  const auto decay = peaks(eps, c.times);
  std::vector<double> lt, lm;
  for (const auto& [t, m] : decay) {
    r.rows.push_back(ReportRow::measure("E3", eps, t, "max_amplitude", m));
    lt.push_back(std::log(t));
    lm.push_back(std::log(m));
  }
  r.rows.push_back(ReportRow::check("E3", eps, NAN, "loglog_slope", detail::fit_slope(lt, lm), Tolerance::within(-0.5, 0.05)));
  const double a = peaks(eps, {t_pref}).front().second, b = peaks(2 * eps, {t_pref}).front().second;
  const double target = std::pow(2.0, 0.25);
  r.rows.push_back(ReportRow::check("E3", eps, t_pref, "amplitude_ratio_eps_2eps", a / b, Tolerance::within(target, 0.05 * target)));
}

/// Subluminal support cone and decay outside it.
inline void run_e5(const ExperimentConfig& c, ExperimentResult& r) {
  const Scene sc = detail::flat_scene(c, "E5");
  const double t = c.times.front();
  for (double eps : c.epsilons) {
    const double se = std::sqrt(eps);
    const auto spec = detail::make_spec(sc, ModelSpec::dirac(eps), c.branch(), c.x0, c.envelope.build());
    const Interval vr = spec.phase->valid_range();
    const double h = se / 4;
    const auto xs = detail::node_range(std::max(vr.lo, c.x0 - 2 * t - 1), std::min(vr.hi, c.x0 + 2 * t + 1), h);
    const LongitudinalTable tab = assemble_longitudinal(spec, t, xs);
    // transverse profiles are orthonormal, so |v|² integrates to Σ|coefficients|² along x̃
    const double w = c.param("width_sds", 4.0) * se / spec.envelope.width();
    const double lim = 1.05 * t + w;
    double in = 0.0, all = 0.0;
    for (std::size_t i = 0; i < tab.xs.size(); ++i) {
      double m = 0.0;
      for (int k = 0; k < 2; ++k) m += std::norm(tab.lower[k][i]) + std::norm(tab.upper[k][i]);
      all += m;
      if (std::abs(tab.xs[i] - c.x0) <= lim) in += m;
    }
    r.rows.push_back(ReportRow::check("E5", eps, t, "cone_mass_fraction", in / all, Tolerance::at_least(0.99)));

    const auto ys = detail::node_range(-4 * se, 4 * se, se / 32);
    auto peak_of = [&](const LongitudinalTable& tb) {
      double m = 0.0;
      for (std::size_t i = 0; i < tb.xs.size(); ++i)
        for (double y : ys) m = std::max(m, std::sqrt(norm2(tb.at_node(i, y))));
      return m;
    };
    const double peak = peak_of(tab);
    const double outside = peak_of(assemble_longitudinal(spec, t, {c.x0 - 1.5 * t, c.x0 + 1.5 * t}));
    r.rows.push_back(ReportRow::check("E5", eps, t, "relative_amplitude_at_1.5t", outside / peak, Tolerance::below(1e-4)));
  }
}

/// Stationary phase against adaptive quadrature at random bulk points.
inline void run_e6(const ExperimentConfig& c, ExperimentResult& r) {
  const Scene sc = detail::flat_scene(c, "E6");
  const double t = c.times.front();
  const int samples = static_cast<int>(c.param("samples", 24));
  const double vmax = c.param("max_ratio", 0.8);
  std::mt19937_64 rng(c.seed);
  std::uniform_real_distribution<double> uv(-vmax, vmax), uz(-1.0, 1.0);
  std::vector<std::pair<double, double>> pts;  // (x̃ − x0)/t and ỹ/√ε
  for (int i = 0; i < samples; ++i) {
    const double v = uv(rng);
    pts.emplace_back(v, uz(rng));
  }
  std::vector<double> errs;
  for (double eps : c.epsilons) {
    const double se = std::sqrt(eps);
    const auto spec = detail::make_spec(sc, ModelSpec::dirac(eps), c.branch(), c.x0, c.envelope.build());
    double worst = 0.0;
    for (const auto& [v, z] : pts) {
      const double x = c.x0 + v * t, y = z * se;
      const auto sp = stationary_phase_eval(spec, t, x, y);
      const Spinor q = detail::quadrature_eval(spec, t, x, y);
      const double err = std::sqrt(norm2({sp.value[0] - q[0], sp.value[1] - q[1]}) / norm2(q));
      worst = std::max(worst, err);
    }
    errs.push_back(worst);
    if (eps == c.epsilons.front())
      r.rows.push_back(ReportRow::check("E6", eps, t, "sp_rel_error", worst, Tolerance::below(c.param("sp_tolerance", 0.05))));
    else
      r.rows.push_back(ReportRow::measure("E6", eps, t, "sp_rel_error", worst));
  }
  for (std::size_t i = 0; i + 1 < errs.size(); ++i)
    r.rows.push_back(ReportRow::check("E6", c.epsilons[i + 1], t, "sp_error_ratio", errs[i] / errs[i + 1],
                                      Tolerance::range(1.5, 3.0)));
  const auto spec = detail::make_spec(sc, ModelSpec::dirac(c.epsilons.front()), c.branch(), c.x0, c.envelope.build());
  const auto root = stationary_point(*spec.phase, t, c.x0 + t / std::sqrt(3.0));
  r.rows.push_back(ReportRow::check("E6", NAN, t, "xi_star_at_inv_sqrt3", root ? *root : NAN, Tolerance::within(1.0, 1e-8)));
}

/// Dirac one-way transport on the flat and circle walls, KG two-way transport.
inline void run_e4(const ExperimentConfig& c, ExperimentResult& r) {
  const Scene flat = detail::flat_scene(c, "E4");
  WallConfig circle_cfg;
  circle_cfg.kind = "circle";
  circle_cfg.radius = c.param("circle_radius", 1.0);
  const double R = circle_cfg.radius;
  circle_cfg.bounds = {-2 * R - 1, 2 * R + 1, -2 * R - 1, 2 * R + 1};
  circle_cfg.seed = {R, 0.0};
  circle_cfg.max_length = 4 * pi * R + 1;
  const Scene circle = Scene::build(circle_cfg);
  const double eps = c.epsilons.front(), se = std::sqrt(eps);
  const double pad = detail::grid_padding(c, eps), h = detail::grid_step(c, eps);
  const double t_end = *std::max_element(c.times.begin(), c.times.end());
  const LongitudinalProfile prof{c.param("profile_width", 1.0), 0.0};
  const double speed_tol = 0.01;

  auto track = [&](auto&& advance, auto&& field_of, const RectificationMap& map, double (*centre)(double, double),
                   double x0, const std::string& tag) {
    std::vector<double> ts, xs;
    std::vector<Observables> obs;
    for (double t : c.times) {
      advance(t);
      const Observables o = observe(field_of(), map, 0.0, centre(x0, t));
      obs.push_back(o);
      ts.push_back(t);
      xs.push_back(o.center);
    }
    const std::string path = (std::filesystem::path(c.output_dir) / ("e4_" + tag + "_observables.csv")).string();
    std::ofstream os(path);
    write_observables_csv(obs, os);
    r.artifacts.push_back(path);
    return detail::fit_slope(ts, xs);
  };

  struct Case {
    const Scene* scene;
    std::string tag;
    double x0;
  };
  for (const Case& cs : {Case{&flat, "flat", c.x0}, Case{&circle, "circle", 0.0}}) {
    const Scene& sc = *cs.scene;
    const RectificationMap map = sc.map(detail::tube_eta(c, eps));
    const Rect box = sc.curve->closed() ? padded(curve_box(*sc.curve, 0.0, sc.curve->total_length()), pad)
                                        : Rect{cs.x0 - t_end - pad, cs.x0 + t_end + pad, -pad, pad};
    const Grid grid = detail::checked_grid(c, box, h);
    const auto ws = WallSamples::sample(sc.wall, grid);
    DiracSolver solver(grid, ws.kappa, eps, c.solver.fourth_order);
    const double dt = detail::dirac_dt(c, eps);
    const RelativisticMode mode(BranchSpec::dirac_relativistic(), sc.curve, prof, cs.x0, eps);

    Field u = relativistic_field(mode, map, grid, c.times.front(), false, cs.x0);
    const double v = track([&](double t) { solver.advance(u, t, dt); }, [&]() -> const Field& { return u; }, map,
                           [](double x0, double t) { return x0 - t; }, cs.x0, "dirac_" + cs.tag);
    r.rows.push_back(ReportRow::check("E4", eps, t_end, "dirac_speed_" + cs.tag, v, Tolerance::within(-1.0, speed_tol)));

    Field w = relativistic_field(mode, map, grid, 0.0, false, cs.x0);
    for (std::size_t i = 0; i < grid.size(); ++i) w.component(1)[i] = -w.component(1)[i];
    solver.advance(w, t_end, dt);
    std::vector<double> centers;
    const Interval span = sc.curve->closed() ? Interval{cs.x0 - 0.5 * sc.curve->total_length(), cs.x0 + 0.5 * sc.curve->total_length()}
                                             : Interval{box.x_min, box.x_max};
    for (double s = span.lo; s < span.hi; s += se / 4) centers.push_back(s);
    r.rows.push_back(ReportRow::check("E4", eps, t_end, "reversed_spinor_overlap_" + cs.tag,
                                      detail::max_relativistic_overlap(w, map, prof, eps, centers), Tolerance::below(0.2)));
    if (cs.tag == "flat") detail::save_field(w, c, "e4_reversed_flat.bin", r);
  }

  const RectificationMap map = flat.map(detail::tube_eta(c, eps));
  const Grid grid = detail::checked_grid(c, {c.x0 - t_end - pad, c.x0 + t_end + pad, -pad, pad}, h);
  const auto ws = WallSamples::sample(flat.wall, grid);
  for (int sign : {1, -1}) {
    KGSolver solver(grid, ws, eps);
    const double dt = c.param("kg_dt_fraction", 0.5) * solver.stability_limit();
    const RelativisticMode mode(BranchSpec::create(Model::KleinGordon, 0, sign), flat.curve, prof, c.x0, eps);
    const double t0 = c.times.front();
    KGState s{relativistic_field(mode, map, grid, t0), relativistic_field(mode, map, grid, t0, true)};
    const double v = track([&](double t) { solver.advance(s, t, dt); }, [&]() -> const Field& { return s.u; }, map,
                           sign > 0 ? +[](double x0, double t) { return x0 + t; } : +[](double x0, double t) { return x0 - t; },
                           c.x0, sign > 0 ? "kg_plus" : "kg_minus");
    r.rows.push_back(ReportRow::check("E4", eps, t_end, sign > 0 ? "kg_speed_plus" : "kg_speed_minus", v,
                                      Tolerance::within(static_cast<double>(sign), speed_tol)));
  }
}

/// t = 0 field of the configured packet on its default grid.
inline Field pack_field(const ExperimentConfig& c) {
  const Scene sc = Scene::build(c.wall);
  const double eps = c.epsilons.front();
  const RectificationMap map = sc.map(detail::tube_eta(c, eps));
  const double pad = detail::grid_padding(c, eps);
  const LevelCurve& curve = *sc.curve;
  const double half = c.param("half_length", 1.5);
  const Rect box = curve.closed() ? padded(curve_box(curve, 0.0, curve.total_length()), pad)
                                  : padded(curve_box(curve, std::max(curve.s_min(), c.x0 - half),
                                                     std::min(curve.s_max(), c.x0 + half)), pad);
  const Grid grid = detail::checked_grid(c, box, detail::grid_step(c, eps));
  const ModelSpec model = ModelSpec::make(c.model_kind(), eps);
  const BranchSpec b = c.branch();
  if (b.relativistic()) {
    const RelativisticMode mode(b, sc.curve, {c.envelope.width, c.envelope.center}, c.x0, eps);
    return relativistic_field(mode, map, grid, 0.0, false, c.x0);
  }
  return dispersive_field(detail::make_spec(sc, model, b, c.x0, c.envelope.build()), map, grid, 0.0, {}, c.x0);
}

/// Advances `init` with the configured Dirac solver to each configured time.
/// KG runs start from rest in ε∂_t u unless `p` is given.
inline std::vector<Field> solve_field(const ExperimentConfig& c, const Field& init, const Field* p = nullptr) {
  const Scene sc = Scene::build(c.wall);
  const double eps = init.epsilon > 0.0 ? init.epsilon : c.epsilons.front();
  const auto ws = WallSamples::sample(sc.wall, init.grid);
  std::vector<Field> out;
  if (init.ncomp == 2) {
    DiracSolver solver(init.grid, ws.kappa, eps, c.solver.fourth_order);
    Field u = init;
    for (double t : c.times) {
      solver.advance(u, t, detail::dirac_dt(c, eps));
      out.push_back(u);
    }
    return out;
  }
  KGSolver solver(init.grid, ws, eps);
  KGState s{init, p ? *p : Field(init.grid, 1, init.time, eps)};
  const double dt = c.param("kg_dt_fraction", 0.5) * solver.stability_limit();
  for (double t : c.times) {
    solver.advance(s, t, dt);
    out.push_back(s.u);
  }
  return out;
}

inline void write_rows(const std::vector<ReportRow>& rows, const ExperimentConfig& c, const std::string& name,
                       ExperimentResult& r) {
  const std::string path = (std::filesystem::path(c.output_dir) / name).string();
  write_report_csv(rows, path);
  r.artifacts.push_back(path);
}

/// Runs one acceptance experiment, writing report.csv (deterministic rows),
/// timing.csv (wall-clock rows) and field snapshots into the output directory.
inline ExperimentResult run_experiment(const ExperimentConfig& c) {
  c.validate();
  c.prepare_output();
  ExperimentResult r;
  if (c.experiment == "E1") run_e1(c, r);
  else if (c.experiment == "E2") run_e2(c, r);
  else if (c.experiment == "E3") run_e3(c, r);
  else if (c.experiment == "E4") run_e4(c, r);
  else if (c.experiment == "E5") run_e5(c, r);
  else if (c.experiment == "E6") run_e6(c, r);
  else if (c.experiment == "props") r.rows = run_properties(c.seed, c.param("solver_steps", 1e4));
  else fail(ErrorCode::ConfigError, "experiment: '" + c.experiment + "' has no acceptance run; use pack or solve");
  write_rows(r.rows, c, "report.csv", r);
  if (!r.timing.empty()) write_rows(r.timing, c, "timing.csv", r);
  return r;
}

}  // namespace edgewave
