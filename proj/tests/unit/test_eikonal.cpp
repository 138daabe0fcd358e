#include <catch_amalgamated.hpp>

#include <cmath>
#include <memory>
#include <sstream>

#include "edgewave/core/quadrature.hpp"
#include "edgewave/eikonal/phase.hpp"
#include "edgewave/geometry/domain_wall.hpp"

using namespace edgewave;
using Catch::Matchers::WithinAbs;
using Catch::Matchers::WithinRel;

namespace {

std::shared_ptr<const LevelCurve> flat_curve() {
  return std::make_shared<const LevelCurve>(trace_level_set(DomainWall::flat({-12, 12, -2, 2}), {0, 0}, 0.05, 22.0));
}

// Γ is the x axis and μ(x) = 1 + 0.2 sin x.
std::shared_ptr<const LevelCurve> modulated_curve() {
  return std::make_shared<const LevelCurve>(
      trace_level_set(DomainWall::analytic("y*(1 + 0.2*sin(x))", {-8, 8, -2, 2}), {0, 0}, 0.005, 14.0));
}

double mu_mod(double x) { return 1.0 + 0.2 * std::sin(x); }

const auto d1p = BranchSpec::create(Model::Dirac, 1, +1);
const auto d1m = BranchSpec::create(Model::Dirac, 1, -1);

}  // namespace

TEST_CASE("flat wall Dirac m = 1 phase is the paper's closed form") {
  const auto curve = flat_curve();
  for (const auto& b : {d1p, d1m}) {
    const PhaseSolution ph(b, curve, 0.5, Support::interval(-3, 3), {-5, 5});
    CHECK(ph.constant_slope());
    CHECK_FALSE(ph.truncated());
    for (double xi : {-2.0, 0.0, 1.3})
      for (double x : {-4.0, 0.5, 3.0})
        for (double t : {0.0, 1.0, 2.5}) {
          const double want = -b.sign() * std::sqrt(2 + xi * xi) * t + xi * (x - 0.5);
          CHECK_THAT(ph.eval(t, x, xi).G, WithinAbs(want, 1e-13));
        }
  }
}

TEST_CASE("relativistic phase G = ξ(t + x̃ − x0)") {
  const PhaseSolution ph(BranchSpec::dirac_relativistic(), flat_curve(), 0.0, Support::interval(-2, 2), {-5, 5});
  for (double xi : {-1.0, 0.7})
    for (double x : {-1.0, 2.0}) CHECK_THAT(ph.eval(1.5, x, xi).G, WithinAbs(xi * (1.5 + x), 1e-14));
}

TEST_CASE("circle wall constant slope gives k = ξ and B = √5 at ξ = 1") {
  const auto curve = std::make_shared<const LevelCurve>(
      trace_level_set(DomainWall::circle(1.0, {-2.5, 2.5, -2.5, 2.5}), {1, 0}, 0.02, 20.0));
  const PhaseSolution ph(d1p, curve, 0.0, Support::interval(0, 2), {-10, 10});
  CHECK(ph.constant_slope());
  CHECK_THAT(ph.B(1.0), WithinAbs(std::sqrt(5.0), 1e-9));
  for (double x : {-7.0, 0.0, 2.0, 9.0}) {
    CHECK_THAT(ph.k(x, 1.0), WithinAbs(1.0, 1e-15));
    CHECK_THAT(dispersion(d1p, ph.k(x, 1.0), curve->slope(x)) - ph.B(1.0), WithinAbs(0.0, 1e-9));
    CHECK_THAT(ph.A(x, 1.0)[0], WithinAbs(x, 1e-15));
  }
}

TEST_CASE("variable slope: eikonal residual and launch condition") {
  const auto curve = modulated_curve();
  for (double s : {0.0, 2.0})
    CHECK_THAT(curve->slope(s), WithinAbs(mu_mod(s), 1e-9));
  for (int m : {1, 2}) {
    const auto b = BranchSpec::create(Model::Dirac, m, 1);
    const PhaseSolution ph(b, curve, 0.3, Support::interval(1.0, 3.0), {-5, 5});
    CHECK_FALSE(ph.constant_slope());
    CHECK_FALSE(ph.truncated());
    for (double xi : ph.xi_grid()) {
      CHECK(ph.k(0.3, xi) == xi);
      for (double x = -5.0; x <= 5.0; x += 0.37)
        CHECK(std::abs(dispersion(b, ph.k(x, xi), ph.slope(x)) - ph.B(xi)) < 1e-10);
    }
  }
}

TEST_CASE("variable slope: A and its ξ-derivatives against quadrature oracles") {
  const auto curve = modulated_curve();
  const int m = 1;
  const double x0 = -0.4;
  const PhaseSolution ph(d1p, curve, x0, Support::interval(0.8, 2.5), {-5, 5});
  const double mu0 = ph.mu0();
  auto kk = [&](double x, double xi) { return std::sqrt(xi * xi + 2 * m * (mu0 - mu_mod(x))); };
  for (double xi : {0.8, 1.4, 2.5})
    for (double x : {-4.9, -1.0, 1.7, 4.5}) {
      const auto a = ph.A(x, xi);
      const double oracle = quad::adaptive([&](double s) { return kk(s, xi); }, x0, x, 1e-13);
      CHECK_THAT(a[0], WithinAbs(oracle, 1e-8));
      const double h = 1e-3;
      auto d5 = [&](int c) {
        return (ph.A(x, xi - 2 * h)[c] - 8 * ph.A(x, xi - h)[c] + 8 * ph.A(x, xi + h)[c] - ph.A(x, xi + 2 * h)[c]) / (12 * h);
      };
      const double fd1 = d5(0), fd2 = d5(1);
      CHECK_THAT(a[1], WithinAbs(fd1, 1e-6 * (1 + std::abs(fd1))));
      CHECK_THAT(a[2], WithinAbs(fd2, 1e-6 * (1 + std::abs(fd2))));
    }
  // tabulation agrees with pointwise evaluation
  std::vector<double> xs;
  for (double x = -4.5; x <= 4.5; x += 0.3) xs.push_back(x);
  std::vector<double> a, k;
  ph.tabulate(xs, 1.1, a, k);
  for (std::size_t i = 0; i < xs.size(); ++i) {
    CHECK_THAT(a[i], WithinAbs(ph.A(xs[i], 1.1)[0], 1e-12));
    CHECK_THAT(k[i], WithinAbs(ph.k(xs[i], 1.1), 1e-15));
  }
}

TEST_CASE("turning points truncate the valid range") {
  const auto curve = modulated_curve();
  // k² = ξ² + 0.4 (sin 0 − sin x) vanishes at sin x = ξ²/0.4
  const PhaseSolution ph(d1p, curve, 0.0, Support::interval(0.2, 1.0), {-3, 3});
  CHECK(ph.truncated());
  CHECK_THAT(ph.valid_range().hi, WithinAbs(std::asin(0.1), 1e-4));
  CHECK_THAT(ph.valid_range().lo, WithinAbs(-3.0, 0.0));
  CHECK_THROWS_AS(ph.A(0.2, 0.5), Error);
  try {
    (void)PhaseSolution(d1p, curve, 0.0, Support::interval(-0.5, 1.0), {-3, 3});
    FAIL("expected TurningPointAtLaunch");
  } catch (const Error& e) {
    CHECK(e.code() == ErrorCode::TurningPointAtLaunch);
  }
  try {
    (void)PhaseSolution(d1p, curve, 0.0, Support{}, {-3, 3});
    FAIL("expected EmptySupport");
  } catch (const Error& e) {
    CHECK(e.code() == ErrorCode::EmptySupport);
  }
}

TEST_CASE("stationary points on the flat wall") {
  const auto curve = flat_curve();
  const PhaseSolution ph(d1p, curve, 0.0, Support::interval(-6, 6), {-5, 5});
  auto r0 = stationary_point(ph, 1.0, 0.0);
  REQUIRE(r0);
  CHECK_THAT(*r0, WithinAbs(0.0, 1e-12));
  auto r1 = stationary_point(ph, 1.0, 1.0 / std::sqrt(3.0));
  REQUIRE(r1);
  CHECK_THAT(*r1, WithinAbs(1.0, 1e-11));
  // the paper's closed form (x/t)√2 (1 − (x/t)²)^{−1/2}
  for (double v : {-0.8, -0.3, 0.45, 0.9}) {
    auto r = stationary_point(ph, 2.0, 2.0 * v);
    REQUIRE(r);
    CHECK_THAT(*r, WithinAbs(v * std::sqrt(2.0) / std::sqrt(1 - v * v), 1e-10));
    CHECK(std::abs(ph.eval(2.0, 2.0 * v, *r).dG) < 1e-11);
  }
  CHECK_FALSE(stationary_point(ph, 1.0, 1.2));
  CHECK_THROWS_AS(stationary_point(ph, 0.0, 0.2), Error);
  // the negative branch moves the other way
  const PhaseSolution pm(d1m, curve, 0.0, Support::interval(-6, 6), {-5, 5});
  auto rm = stationary_point(pm, 1.0, 1.0 / std::sqrt(3.0));
  REQUIRE(rm);
  CHECK_THAT(*rm, WithinAbs(-1.0, 1e-11));
}

TEST_CASE("phase Hessian") {
  const auto curve = flat_curve();
  const PhaseSolution ph(d1p, curve, 0.0, Support::interval(-6, 6), {-5, 5});
  CHECK_THAT(phase_hessian(ph, 1.0, 0.0, 0.0), WithinAbs(-1.0 / std::sqrt(2.0), 1e-14));
  CHECK_THAT(phase_hessian(ph, 2.0, 0.0, 0.0), WithinAbs(-std::sqrt(2.0), 1e-14));
  const PhaseSolution rel(BranchSpec::dirac_relativistic(), curve, 0.0, Support::interval(-2, 2), {-5, 5});
  try {
    (void)phase_hessian(rel, 1.0, -1.0, 0.3);
    FAIL("expected DegenerateHessian");
  } catch (const Error& e) {
    CHECK(e.code() == ErrorCode::DegenerateHessian);
  }
  CHECK_FALSE(stationary_point(rel, 1.0, 0.5));
  CHECK_THROWS_AS(stationary_point(rel, 1.0, -1.0), Error);
}

TEST_CASE("variable slope: stationary point, Hessian and ray flow") {
  const auto curve = modulated_curve();
  const PhaseSolution ph(d1p, curve, 0.0, Support::interval(0.8, 4.0), {-5, 5});
  const double h = 1e-5;
  for (double t : {0.7, 1.5, 3.0}) {
    const double xc = ph.ray_position(t, 1.5);
    auto r = stationary_point(ph, t, xc);
    REQUIRE(r);
    CHECK_THAT(*r, WithinAbs(1.5, 1e-9));
    CHECK(std::abs(ph.eval(t, xc, *r).dG) < 1e-11);
    const double g2 = phase_hessian(ph, t, xc, *r);
    const double fd = (ph.eval(t, xc, *r + h).dG - ph.eval(t, xc, *r - h).dG) / (2 * h);
    CHECK(std::abs(g2 - fd) < 1e-6 * (1 + std::abs(g2)));
    // d x_c/dt equals the local group velocity k/E
    const double dt = 1e-5;
    const double v = (ph.ray_position(t + dt, 1.5) - ph.ray_position(t - dt, 1.5)) / (2 * dt);
    CHECK_THAT(v, WithinAbs(group_velocity(d1p, ph.k(xc, 1.5), ph.slope(xc)), 1e-6));
  }
}

TEST_CASE("phase CSV export") {
  const PhaseSolution ph(d1p, flat_curve(), 0.0, Support::interval(-1, 1), {-2, 2});
  std::ostringstream os;
  ph.write_csv(os, {0.0, 1.0}, {-1.0, 0.5});
  const std::string out = os.str();
  CHECK(out.rfind("x̃,ξ,A,∂_xA,∂_ξA\n", 0) == 0);
  CHECK(std::count(out.begin(), out.end(), '\n') == 5);
}

TEST_CASE("KG m = 0 support must avoid ξ = 0") {
  const auto k0 = BranchSpec::create(Model::KleinGordon, 0, -1);
  CHECK_THROWS_AS(PhaseSolution(k0, flat_curve(), 0.0, Support::interval(-1, 1), {-2, 2}), Error);
  const PhaseSolution ph(k0, flat_curve(), 0.0, Support::interval(0.5, 3), {-2, 2});
  CHECK_THAT(ph.eval(1.0, 0.3, 2.0).G, WithinAbs(2.0 * 1.0 + 2.0 * 0.3, 1e-14));
}
