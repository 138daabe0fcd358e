#include <catch_amalgamated.hpp>

#include <cmath>
#include <cstdio>
#include <filesystem>
#include <memory>
#include <random>
#include <sstream>

#include "edgewave/core/quadrature.hpp"
#include "edgewave/geometry/domain_wall.hpp"
#include "edgewave/geometry/rectification.hpp"
#include "edgewave/wavepacket/ansatz.hpp"
#include "edgewave/wavepacket/envelope.hpp"
#include "edgewave/wavepacket/field.hpp"
#include "edgewave/wavepacket/push_forward.hpp"
#include "edgewave/wavepacket/relativistic.hpp"
#include "edgewave/wavepacket/stationary_phase.hpp"

using namespace edgewave;
using Catch::Matchers::WithinAbs;
using Catch::Matchers::WithinRel;

namespace {

std::shared_ptr<const LevelCurve> flat_curve(double half = 8.0) {
  return std::make_shared<const LevelCurve>(
      trace_level_set(DomainWall::flat({-half - 1, half + 1, -2, 2}), {0, 0}, 0.05, 2 * half + 1));
}

WavepacketSpec flat_m1(double eps, const Envelope& env, int sign = 1, double x0 = 0.0) {
  const auto b = BranchSpec::create(Model::Dirac, 1, sign);
  auto ph = std::make_shared<const PhaseSolution>(b, flat_curve(), x0, Support::interval(-12, 12), Interval{-7, 7});
  return {ModelSpec::dirac(eps), b, ph, env};
}

/// Independent flat-wall m = 1 integrand: f(ξ) e^{iG/√ε} [α(1,1) φ0 + β(1,−1) φ1]/√2 /√ε.
Spinor flat_m1_integrand(double eps, const Envelope& env, int s, double t, double x, double y, double xi) {
  const double e = s * std::sqrt(2 + xi * xi);
  double a = 1.0, b = (e - xi) / std::sqrt(2.0);
  const double n = std::hypot(a, b);
  a /= n;
  b /= n;
  const double z = y / std::sqrt(eps);
  const double p0 = std::pow(pi, -0.25) * std::exp(-z * z / 2), p1 = std::sqrt(2.0) * z * p0;
  const cplx ph = std::polar(env(xi) / std::sqrt(eps), (-e * t + xi * x) / std::sqrt(eps));
  const double r = 1 / std::sqrt(2.0);
  return {ph * r * (a * p0 + b * p1), ph * r * (a * p0 - b * p1)};
}

Spinor flat_m1_oracle(double eps, const Envelope& env, int s, double t, double x, double y) {
  const Interval w = env.window();
  Spinor out{};
  for (int c = 0; c < 2; ++c)
    out[c] = quad::adaptive([&](double xi) { return flat_m1_integrand(eps, env, s, t, x, y, xi)[c]; }, w.lo, w.hi,
                            1e-13);
  return out;
}

double rel_err(const Spinor& a, const Spinor& b) { return std::sqrt(norm2({a[0] - b[0], a[1] - b[1]}) / norm2(b)); }

}  // namespace

TEST_CASE("envelopes are normalized and decay inside their window") {
  const auto g = Envelope::gaussian(1.0, 0.4);
  CHECK_THAT(quad::adaptive([&](double x) { return g(x) * g(x); }, -10, 10, 1e-14), WithinAbs(1.0, 1e-8));
  CHECK(g(g.window().lo) < 1e-14 * g(1.0));
  CHECK(g(g.window().hi) < 1e-14 * g(1.0));
  const auto b = Envelope::bump(0.7, 1.3);
  CHECK_THAT(quad::adaptive([&](double x) { return b(x) * b(x); }, 0.7, 1.3, 1e-14), WithinAbs(1.0, 1e-8));
  CHECK(b(0.7) == 0.0);
  CHECK(b(1.3) == 0.0);
  CHECK_THROWS_AS(Envelope::gaussian(0.0, -1.0), Error);
  CHECK_THROWS_AS(Envelope::bump(1.0, 1.0), Error);
}

TEST_CASE("t = 0 assembly equals Fourier synthesis of the envelope") {
  const double eps = 0.01;
  const auto env = Envelope::gaussian(0.8, 0.5);
  const auto spec = flat_m1(eps, env);
  std::vector<double> xs;
  for (double x = -1.0; x <= 1.0; x += 0.05) xs.push_back(x);
  const std::vector<double> ys{-0.15, 0.0, 0.07};
  const auto r = assemble_rectified(spec, 0.0, xs, ys);
  // trapezoid Fourier synthesis on a fine uniform ξ lattice (spectrally accurate for Gaussians)
  const Interval w = env.window();
  const int n = 6000;
  double worst = 0.0, scale = 0.0;
  for (std::size_t iy = 0; iy < ys.size(); ++iy)
    for (std::size_t ix = 0; ix < xs.size(); ++ix) {
      Spinor s{};
      for (int q = 0; q <= n; ++q) {
        const double xi = w.lo + w.width() * q / n;
        const double wq = w.width() / n * ((q == 0 || q == n) ? 0.5 : 1.0);
        const Spinor v = flat_m1_integrand(eps, env, 1, 0.0, xs[ix], ys[iy], xi);
        s[0] += wq * v[0];
        s[1] += wq * v[1];
      }
      for (int c = 0; c < 2; ++c) {
        worst = std::max(worst, std::abs(r.at(c, ix, iy) - s[c]));
        scale = std::max(scale, std::abs(s[c]));
      }
    }
  CHECK(worst < 1e-8 * scale);
}

TEST_CASE("t = 1 assembly agrees with adaptive quadrature at random points") {
  const double eps = 0.01;
  const auto env = Envelope::gaussian(1.0, 0.5);
  const auto spec = flat_m1(eps, env);
  std::mt19937_64 rng(3);
  std::uniform_real_distribution<double> ux(-0.2, 1.0), uy(-0.2, 0.2);
  for (int i = 0; i < 10; ++i) {
    const double x = ux(rng), y = uy(rng);
    const auto tab = assemble_longitudinal(spec, 1.0, {x});
    const Spinor got = tab.at_node(0, y);
    const Spinor want = flat_m1_oracle(eps, env, 1, 1.0, x, y);
    const double scale = std::sqrt(norm2(want)) + 1e-3;
    CHECK(std::sqrt(norm2({got[0] - want[0], got[1] - want[1]})) < 1e-7 * scale);
  }
}

TEST_CASE("KG m = 0 ansatz is transported rigidly") {
  const double eps = 0.01, c = 3.0, sg = 0.3, t = 0.7;
  const auto b = BranchSpec::create(Model::KleinGordon, 0, -1);
  auto ph = std::make_shared<const PhaseSolution>(b, flat_curve(), 0.0, Support::interval(0.1, 6), Interval{-4, 4});
  const auto env = Envelope::gaussian(c, sg);
  const WavepacketSpec spec{ModelSpec::klein_gordon(eps), b, ph, env};
  std::vector<double> xs;
  for (double x = -1.2; x <= -0.2; x += 0.01) xs.push_back(x);
  const auto tab = assemble_longitudinal(spec, t, xs);
  const double se = std::sqrt(eps), norm_f = std::pow(pi * sg * sg, -0.25);
  for (std::size_t i = 0; i < xs.size(); ++i) {
    const double X = (xs[i] + t) / se;
    // ∫ e^{iξX} e^{−(ξ−c)²/(2σ²)} dξ = σ√(2π) e^{icX} e^{−σ²X²/2}
    const cplx f_hat = norm_f * sg * std::sqrt(2 * pi) * std::polar(std::exp(-0.5 * sg * sg * X * X), c * X);
    for (double y : {0.0, 0.05}) {
      const cplx want = f_hat / se * std::pow(pi, -0.25) * std::exp(-0.5 * y * y / eps);
      CHECK(std::abs(tab.at_node(i, y)[0] - want) < 1e-9 * (1 + std::abs(want)));
    }
  }
}

TEST_CASE("assembly reports horizon and validity problems") {
  const auto spec = flat_m1(0.01, Envelope::gaussian(1.0, 0.5));
  const auto tab = assemble_longitudinal(spec, 6.0, {0.0, 1.0});
  CHECK_FALSE(tab.warnings.empty());
  CHECK(assemble_longitudinal(spec, 1.0, {0.0}).warnings.empty());
  CHECK_THROWS_AS(assemble_longitudinal(spec, 1.0, {9.0}), Error);
  AssemblyOptions tight;
  tight.max_nodes = 50;
  try {
    (void)assemble_longitudinal(spec, 3.0, {-6.0, 6.0}, tight);
    FAIL("expected UnderResolvedQuadrature");
  } catch (const Error& e) {
    CHECK(e.code() == ErrorCode::UnderResolvedQuadrature);
  }
  WavepacketSpec bad = spec;
  bad.J = 1;
  CHECK_THROWS_AS(bad.validate(), Error);
}

TEST_CASE("separable sampler reproduces direct assembly off the nodes") {
  const double eps = 0.004;
  const auto env = Envelope::gaussian(1.0, 0.5);
  const auto spec = flat_m1(eps, env);
  const auto nodes = uniform_nodes(-1.0, 2.0, std::sqrt(eps) / 16);
  const SeparableSampler smp(assemble_longitudinal(spec, 0.8, nodes), spec.phase);
  std::mt19937_64 rng(5);
  std::uniform_real_distribution<double> ux(-0.5, 1.5), uy(-0.1, 0.1);
  double peak = 0.0, worst = 0.0;
  for (int i = 0; i < 40; ++i) {
    const double x = ux(rng), y = uy(rng);
    const Spinor want = assemble_longitudinal(spec, 0.8, {x}).at_node(0, y);
    const Spinor got = smp(x, y);
    peak = std::max(peak, std::sqrt(norm2(want)));
    worst = std::max(worst, std::sqrt(norm2({got[0] - want[0], got[1] - want[1]})));
  }
  CHECK(worst < 1e-6 * peak);
  CHECK(norm2(smp(-3.0, 0.0)) == 0.0);
}

TEST_CASE("bicubic rectified field interpolates smooth data") {
  const double eps = 0.01;
  const auto spec = flat_m1(eps, Envelope::gaussian(0.0, 0.5));
  const double h = std::sqrt(eps) / 12;
  const auto xs = uniform_nodes(-0.5, 0.5, h), ys = uniform_nodes(-0.4, 0.4, h);
  const auto r = assemble_rectified(spec, 0.0, xs, ys);
  const Spinor want = assemble_longitudinal(spec, 0.0, {0.013}).at_node(0, 0.021);
  CHECK(rel_err(r(0.013, 0.021), want) < 2e-3);
}

TEST_CASE("flat wall push-forward is identity sampling") {
  const double eps = 0.01;
  const auto spec = flat_m1(eps, Envelope::gaussian(0.5, 0.5));
  auto curve = spec.phase->curve_ptr();
  const RectificationMap map(curve, 0.8);
  const Grid g = Grid::covering({-1, 1, -0.5, 0.5}, 0.02);
  const auto xs = uniform_nodes(g.x(0), g.x(g.nx - 1), g.hx);
  const SeparableSampler smp(assemble_longitudinal(spec, 0.3, xs), spec.phase);
  const Field u = push_forward(map, smp, g, {});
  for (std::size_t iy = 0; iy < g.ny; iy += 7)
    for (std::size_t ix = 0; ix < g.nx; ix += 5) {
      const Spinor want = flat_m1_oracle(eps, spec.envelope, 1, 0.3, g.x(ix), g.y(iy));
      for (int c = 0; c < 2; ++c) CHECK(std::abs(u.at(c, ix, iy) - want[c]) < 1e-7 * (1 + std::abs(want[c])));
    }
}

TEST_CASE("circle push-forward: placement and Jacobian-weighted norm") {
  const double eps = 1e-3;
  auto curve = std::make_shared<const LevelCurve>(
      trace_level_set(DomainWall::circle(1.0, {-2, 2, -2, 2}), {1, 0}, 0.01, 20.0));
  const RectificationMap map(curve, 0.3);
  const auto b = BranchSpec::dirac_relativistic();
  const RelativisticMode mode(b, curve, {0.6, 0.0}, 0.0, eps);
  const Grid g = Grid::covering({0.6, 1.4, -0.4, 0.4}, std::sqrt(eps) / 10);
  const Field u = push_forward(map, mode.at(0.0), g, {});
  double m = 0.0, mx = 0.0, my = 0.0;
  for (std::size_t iy = 0; iy < g.ny; ++iy)
    for (std::size_t ix = 0; ix < g.nx; ++ix) {
      const double w = std::norm(u.at(0, ix, iy)) + std::norm(u.at(1, ix, iy));
      m += w;
      mx += w * g.x(ix);
      my += w * g.y(iy);
    }
  CHECK_THAT(mx / m, WithinAbs(1.0, 2e-3));
  CHECK_THAT(my / m, WithinAbs(0.0, 1e-6));
  // ‖u‖² = ∫∫ |v|² (1 − ỹk) dx̃ dỹ, computed in tube coordinates
  const double se = std::sqrt(eps);
  double v2 = 0.0;
  const double hs = se / 20;
  for (double s = -0.4; s <= 0.4; s += hs)
    for (double y = -0.2; y <= 0.2; y += hs) v2 += norm2(mode.value(0.0, s, y)) * map.jacobian(s, y) * hs * hs;
  CHECK_THAT(u.l2_norm(), WithinRel(std::sqrt(v2), 1e-3));
}

TEST_CASE("relativistic mode reproduces the flat-wall closed forms") {
  const double eps = 0.01, se = 0.1;
  auto curve = flat_curve();
  const LongitudinalProfile fp{0.7, 1.5};
  const RelativisticMode dirac(BranchSpec::dirac_relativistic(), curve, fp, 0.0, eps);
  CHECK(dirac.speed() == -1.0);
  for (double t : {0.0, 0.4})
    for (double x : {-0.5, 0.1})
      for (double y : {0.0, -0.08}) {
        const cplx a = fp((x + t) / se) / se * std::pow(pi, -0.25) * std::exp(-0.5 * y * y / eps);
        const Spinor v = dirac.value(t, x, y);
        CHECK(std::abs(v[0] - a / std::sqrt(2.0)) < 1e-14);
        CHECK(std::abs(v[1] + a / std::sqrt(2.0)) < 1e-14);
      }
  for (int s : {-1, 1}) {
    const RelativisticMode kg(BranchSpec::create(Model::KleinGordon, 0, s), curve, fp, 0.2, eps);
    CHECK(kg.center(1.0) == 0.2 + s);
    const cplx want = fp((0.3 - 0.2 - s * 0.5) / se) / se * std::pow(pi, -0.25);
    CHECK(std::abs(kg.value(0.5, 0.3, 0.0)[0] - want) < 1e-14);
    // ε∂_t by central differences
    const double dt = 1e-5;
    const cplx fd = eps * (kg.value(0.5 + dt, 0.3, 0.0)[0] - kg.value(0.5 - dt, 0.3, 0.0)[0]) / (2 * dt);
    CHECK(std::abs(kg.value(0.5, 0.3, 0.0, true)[0] - fd) < 1e-6 * std::abs(fd) + 1e-10);
  }
  CHECK_THROWS_AS(RelativisticMode(BranchSpec::create(Model::Dirac, 1, 1), curve, fp, 0.0, eps), Error);
}

TEST_CASE("time-derivative assembly matches finite differences") {
  const double eps = 0.01;
  const auto b = BranchSpec::create(Model::KleinGordon, 1, 1);
  auto ph = std::make_shared<const PhaseSolution>(b, flat_curve(), 0.0, Support::interval(-6, 6), Interval{-4, 4});
  const WavepacketSpec spec{ModelSpec::klein_gordon(eps), b, ph, Envelope::gaussian(0.5, 0.4)};
  AssemblyOptions d;
  d.time_derivative = true;
  const double dt = 1e-5;
  for (double x : {0.0, 0.3}) {
    const cplx p = assemble_longitudinal(spec, 0.5, {x}, d).at_node(0, 0.03)[0];
    const cplx fd = eps *
                    (assemble_longitudinal(spec, 0.5 + dt, {x}).at_node(0, 0.03)[0] -
                     assemble_longitudinal(spec, 0.5 - dt, {x}).at_node(0, 0.03)[0]) /
                    (2 * dt);
    CHECK(std::abs(p - fd) < 1e-6 * (1 + std::abs(fd)));
  }
}

TEST_CASE("stationary phase against quadrature") {
  const auto env = Envelope::gaussian(0.0, 1.0);
  double prev_err = 0.0;
  for (double eps : {1e-3, 2.5e-4}) {
    const auto spec = flat_m1(eps, env);
    const auto sp = stationary_phase_eval(spec, 1.0, 0.0, 0.0);
    REQUIRE_FALSE(sp.negligible);
    CHECK_THAT(sp.xi_star, WithinAbs(0.0, 1e-12));
    CHECK_THAT(sp.hessian, WithinAbs(-1 / std::sqrt(2.0), 1e-12));
    const Spinor q = flat_m1_oracle(eps, env, 1, 1.0, 0.0, 0.0);
    const double err = std::abs(std::sqrt(norm2(sp.value)) - std::sqrt(norm2(q))) / std::sqrt(norm2(q));
    if (eps == 1e-3) CHECK(err < 0.03);
    if (eps < 1e-3) CHECK(prev_err / err > 1.5);
    prev_err = err;
    // full complex value agrees too
    CHECK(rel_err(sp.value, q) < 0.05);
  }
  const double eps = 1e-3;
  const auto spec = flat_m1(eps, env);
  const auto far = stationary_phase_eval(spec, 1.0, 1.5, 0.0);
  CHECK(far.negligible);
  CHECK(std::sqrt(norm2(flat_m1_oracle(eps, env, 1, 1.0, 1.5, 0.0))) < eps * eps);
  CHECK_THROWS_AS(stationary_phase_eval(spec, 0.1, 0.0, 0.0), Error);
}

TEST_CASE("dispersive packets keep their norm and stay inside the subluminal cone") {
  const double eps = 1e-3, se = std::sqrt(eps);
  const auto env = Envelope::gaussian(0.0, 1.0);
  const auto spec = flat_m1(eps, env);
  const auto xs = uniform_nodes(-3.0, 3.0, se / 4);
  auto mass = [&](const LongitudinalTable& tab, double lim) {
    // transverse profile is unit-norm, so |v|² integrates to Σ|coeff|² along x̃
    double in = 0.0, all = 0.0;
    for (std::size_t i = 0; i < tab.xs.size(); ++i) {
      double w = 0.0;
      for (int c = 0; c < 2; ++c) w += std::norm(tab.lower[c][i]) + std::norm(tab.upper[c][i]);
      all += w;
      if (std::abs(tab.xs[i]) <= lim) in += w;
    }
    return std::make_pair(in * se / 4, all * se / 4);
  };
  const double m0 = mass(assemble_longitudinal(spec, 0.0, xs), 10).second;
  const double width = 4.0 * se;  // initial spatial width ≈ 4 standard deviations of |f̌|²
  for (double t : {0.5, 1.0, 2.0}) {
    const auto [in, all] = mass(assemble_longitudinal(spec, t, xs), 1.05 * t + width);
    CHECK_THAT(all, WithinRel(m0, 0.01));
    CHECK(in >= 0.99 * all);
  }
}

TEST_CASE("field snapshots round-trip bit-exactly") {
  Grid g;
  g.nx = 6;
  g.ny = 4;
  g.x_min = -1;
  g.y_min = 0.5;
  g.hx = 0.25;
  g.hy = 0.125;
  Field f(g, 2, 0.75, 0.01);
  for (std::size_t i = 0; i < f.data.size(); ++i) f.data[i] = cplx(std::sin(1.0 * i), std::cos(3.0 * i));
  const auto path = (std::filesystem::temp_directory_path() / "edgewave_field_test.bin").string();
  write_field(f, path);
  const Field r = read_field(path);
  CHECK(r.grid == f.grid);
  CHECK(r.ncomp == 2);
  CHECK(r.time == 0.75);
  CHECK(r.epsilon == 0.01);
  CHECK(std::memcmp(r.data.data(), f.data.data(), f.data.size() * sizeof(cplx)) == 0);
  std::remove(path.c_str());
  std::ostringstream os;
  write_slice_csv(f, 'x', 1, os);
  const std::string s = os.str();
  CHECK(s.rfind("x,re0,im0,re1,im1,abs\n", 0) == 0);
  CHECK(std::count(s.begin(), s.end(), '\n') == 7);
  CHECK_THROWS_AS(read_field("/nonexistent/field.bin"), Error);
}

TEST_CASE("amplitude decay table") {
  const double eps = 1e-3, se = std::sqrt(eps);
  const auto spec = flat_m1(eps, Envelope::gaussian(0.0, 1.0));
  const auto xs = uniform_nodes(-2.5, 2.5, se / 4);
  const auto ys = uniform_nodes(-4 * se, 4 * se, se / 8);
  const auto tab = max_amplitude_decay(spec, {0.5, 1.0, 2.0}, xs, ys);
  REQUIRE(tab.size() == 3);
  const double slope = std::log(tab[2].second / tab[0].second) / std::log(4.0);
  CHECK_THAT(slope, WithinAbs(-0.5, 0.05));
}
