#include <catch_amalgamated.hpp>

#include <cmath>

#include "edgewave/spectral/branches.hpp"
#include "edgewave/spectral/hermite.hpp"
#include "edgewave/spectral/profile.hpp"
#include "support/oracles.hpp"

using namespace edgewave;
using Catch::Matchers::WithinAbs;
using Catch::Matchers::WithinRel;

TEST_CASE("hermite reference values") {
  CHECK_THAT(hermite(0, 0.0), WithinAbs(std::pow(pi, -0.25), 1e-15));
  CHECK_THAT(hermite(0, 0.0), WithinAbs(0.751126, 1e-6));
  CHECK_THAT(hermite(1, 0.0), WithinAbs(0.0, 1e-15));
  const double n3 = oracle::simpson([](double z) { return hermite(3, z) * hermite(3, z); }, -14, 14, 4000);
  CHECK_THAT(n3, WithinAbs(1.0, 1e-10));
  // explicit H_3 oracle: φ_3 = (8z³ − 12z) e^{−z²/2} / √(2³ 3! √π)
  for (double z : {-2.0, 0.3, 1.7}) {
    const double want = (8 * z * z * z - 12 * z) * std::exp(-z * z / 2) / std::sqrt(48 * std::sqrt(pi));
    CHECK_THAT(hermite(3, z), WithinAbs(want, 1e-14));
  }
  // high order stays finite
  for (double z : {0.0, 5.0, 9.9, 30.0}) CHECK(std::isfinite(hermite(50, z)));
  CHECK_THROWS_AS(hermite(-1, 0.0), Error);
}

TEST_CASE("hermite orthonormality up to 12") {
  for (int i = 0; i <= 12; ++i)
    for (int j = i; j <= 12; ++j) {
      const double ip = oracle::simpson([&](double z) { return hermite(i, z) * hermite(j, z); }, -14, 14, 6000);
      CHECK_THAT(ip, WithinAbs(i == j ? 1.0 : 0.0, 1e-9));
    }
}

TEST_CASE("ladder identity (z + d/dz) φ_m = √(2m) φ_{m−1}") {
  const double h = 1e-5;
  for (int m = 1; m <= 10; ++m)
    for (double z = -8.0; z <= 8.0; z += 0.25) {
      const double d = (hermite(m, z + h) - hermite(m, z - h)) / (2 * h);
      CHECK_THAT(z * hermite(m, z) + d, WithinAbs(std::sqrt(2.0 * m) * hermite(m - 1, z), 1e-8));
      CHECK_THAT(hermite_derivative(m, z), WithinAbs(d, 1e-8));
    }
}

TEST_CASE("model spec validation") {
  CHECK(ModelSpec::dirac(0.01).q == 1);
  CHECK(ModelSpec::klein_gordon(0.01).q == 2);
  CHECK_THROWS_AS(ModelSpec::dirac(0.3), Error);
  CHECK_THROWS_AS(ModelSpec::dirac(0.0), Error);
  ModelSpec bad{Model::Dirac, 2, 0.1};
  CHECK_THROWS_AS(bad.validate(), Error);
}

TEST_CASE("dispersion examples") {
  const auto d1p = BranchSpec::create(Model::Dirac, 1, +1);
  CHECK_THAT(dispersion(d1p, 0.0, 1.0), WithinAbs(std::sqrt(2.0), 1e-15));
  const auto k0m = BranchSpec::create(Model::KleinGordon, 0, -1);
  CHECK_THAT(dispersion(k0m, 3.0, 1.0), WithinAbs(-3.0, 1e-15));
  const auto d2m = BranchSpec::create(Model::Dirac, 2, -1);
  CHECK_THAT(dispersion(d2m, 1.0, 2.0), WithinAbs(-3.0, 1e-15));
  // flat wall m = 1 is exactly ±√(2 + ξ²)
  for (double xi : {-3.0, -0.5, 0.0, 2.2})
    CHECK(dispersion(BranchSpec::create(Model::Dirac, 1, -1), xi, 1.0) == -std::sqrt(2.0 + xi * xi));
  try {
    (void)BranchSpec::create(Model::Dirac, 0, +1);
    FAIL("Dirac (0,+) must be rejected");
  } catch (const Error& e) {
    CHECK(e.code() == ErrorCode::InvalidBranch);
  }
  CHECK(BranchSpec::dirac_relativistic().kind() == BranchKind::Relativistic);
  CHECK(d1p.kind() == BranchKind::Dispersive);
  CHECK_THROWS_AS(dispersion(d1p, 1.0, 0.0), Error);
  CHECK_THROWS_AS(dispersion(ModelSpec::klein_gordon(0.1), d1p, 1.0, 1.0), Error);
}

TEST_CASE("dispersion matches the diagonalized transverse operator") {
  for (double mu : {1.0, 2.0})
    for (double xi : {-2.0, 0.0, 2.0}) {
      const auto levels = oracle::dirac_energy_squared(xi, mu, 4);
      for (int m = 0; m <= 3; ++m) {
        const double e_fd = std::sqrt(levels[m]);
        if (m == 0) {
          CHECK_THAT(std::abs(dispersion(BranchSpec::dirac_relativistic(), xi, mu)), WithinAbs(e_fd, 1e-4));
          continue;
        }
        for (int s : {-1, 1})
          CHECK_THAT(dispersion(BranchSpec::create(Model::Dirac, m, s), xi, mu), WithinAbs(s * e_fd, 1e-4));
      }
    }
}

TEST_CASE("group velocity") {
  const auto d1p = BranchSpec::create(Model::Dirac, 1, +1);
  CHECK_THAT(group_velocity(d1p, 0.0, 1.0), WithinAbs(0.0, 1e-15));
  CHECK_THAT(group_velocity(d1p, 100.0, 1.0), WithinAbs(1.0, 1e-4));
  CHECK_THAT(group_velocity(BranchSpec::dirac_relativistic(), 3.0, 1.0), WithinAbs(-1.0, 0.0));
  try {
    (void)group_velocity(BranchSpec::create(Model::KleinGordon, 0, 1), 0.0, 1.0);
    FAIL("expected ZeroEnergy");
  } catch (const Error& e) {
    CHECK(e.code() == ErrorCode::ZeroEnergy);
  }
  const double h = 1e-4;
  for (int m = 1; m <= 3; ++m)
    for (int s : {-1, 1})
      for (double mu : {0.5, 2.0})
        for (double xi = -4.0; xi <= 4.0; xi += 0.5) {
          const auto b = BranchSpec::create(Model::Dirac, m, s);
          const double fd = (dispersion(b, xi - 2 * h, mu) - 8 * dispersion(b, xi - h, mu) +
                             8 * dispersion(b, xi + h, mu) - dispersion(b, xi + 2 * h, mu)) / (12 * h);
          CHECK_THAT(group_velocity(b, xi, mu), WithinAbs(fd, 1e-8));
          CHECK(std::abs(group_velocity(b, xi, mu)) < 1.0);
          const double fd2 = (group_velocity(b, xi + h, mu) - group_velocity(b, xi - h, mu)) / (2 * h);
          CHECK_THAT(dispersion_curvature(b, xi, mu), WithinAbs(fd2, 1e-6));
        }
}

namespace {

/// ‖T w − E w‖_∞ with T = ξσ₁ − iσ₂∂_z + μzσ₃ applied by finite differences.
double eigen_defect(const TransverseProfile& p, double e) {
  const double h = 1e-5;
  double worst = 0.0;
  for (double z = -8.0; z <= 8.0; z += 0.05) {
    const auto w = p.components(z);
    const auto wp = p.components(z + h), wm = p.components(z - h);
    const double d0 = (wp[0] - wm[0]) / (2 * h), d1 = (wp[1] - wm[1]) / (2 * h);
    const double mz = p.mu() * z;
    const double t0 = p.xi() * w[1] - d1 + mz * w[0];
    const double t1 = p.xi() * w[0] + d0 - mz * w[1];
    worst = std::max({worst, std::abs(t0 - e * w[0]), std::abs(t1 - e * w[1])});
  }
  return worst;
}

double l2_norm(const TransverseProfile& p) {
  return std::sqrt(oracle::simpson(
      [&](double z) {
        const auto v = p.components(z);
        return v[0] * v[0] + v[1] * v[1];
      },
      -16, 16, 8000));
}

}  // namespace

TEST_CASE("Dirac profiles are normalized eigenvectors of the transverse operator") {
  for (int m = 0; m <= 4; ++m)
    for (int s : {-1, 1}) {
      if (m == 0 && s == 1) continue;
      const auto b = BranchSpec::create(Model::Dirac, m, s);
      for (double mu : {1.0, 2.0, 0.7})
        for (double xi : {-3.0, -0.4, 0.0, 1.0, 5.0}) {
          const TransverseProfile p(b, xi, mu);
          CHECK_THAT(l2_norm(p), WithinAbs(1.0, 1e-10));
          CHECK(eigen_defect(p, dispersion(b, xi, mu)) < 1e-8);
          for (double z : {6.0, -7.5, 9.0}) {
            const auto v = p.components(z);
            CHECK(std::hypot(v[0], v[1]) <= 10.0 * std::exp(-z * z / 4));
          }
        }
    }
}

TEST_CASE("profile spinors vary continuously in ξ") {
  for (int s : {-1, 1}) {
    const auto b = BranchSpec::create(Model::Dirac, 2, s);
    double prev_lo = TransverseProfile(b, -10.0, 1.3).lower()[0];
    for (double xi = -10.0; xi <= 10.0; xi += 0.01) {
      const TransverseProfile p(b, xi, 1.3);
      CHECK(std::abs(p.lower()[0] - prev_lo) < 0.02);
      CHECK(p.lower()[0] > 0.0);
      prev_lo = p.lower()[0];
    }
  }
}

TEST_CASE("profile reference shapes") {
  const TransverseProfile p0(BranchSpec::dirac_relativistic(), 1.7, 1.0);
  for (double z : {-1.0, 0.0, 0.8}) {
    const auto v = p0.components(z);
    const double g = std::pow(pi, -0.25) * std::exp(-z * z / 2) / std::sqrt(2.0);
    CHECK_THAT(v[0], WithinAbs(g, 1e-15));
    CHECK_THAT(v[1], WithinAbs(-g, 1e-15));
  }
  // (σ₁+σ₃)(1, √2 z)ᵀ e^{−z²/2} = (1 + √2 z, 1 − √2 z) e^{−z²/2}, normalized
  const TransverseProfile p1(BranchSpec::create(Model::Dirac, 1, 1), 0.0, 1.0);
  const double nrm = std::sqrt(oracle::simpson(
      [](double z) {
        const double a = 1 + std::sqrt(2.0) * z, b = 1 - std::sqrt(2.0) * z;
        return (a * a + b * b) * std::exp(-z * z);
      },
      -16, 16, 8000));
  for (double z : {-1.3, 0.0, 0.5, 2.0}) {
    const auto v = p1.components(z);
    const double g = std::exp(-z * z / 2) / nrm;
    CHECK_THAT(v[0], WithinAbs((1 + std::sqrt(2.0) * z) * g, 1e-12));
    CHECK_THAT(v[1], WithinAbs((1 - std::sqrt(2.0) * z) * g, 1e-12));
  }
  // KG m = 0, μ = 4: ground state of −∂² + μ²z², i.e. e^{−μz²/2}, normalized by quadrature
  const TransverseProfile k0(BranchSpec::create(Model::KleinGordon, 0, 1), 0.5, 4.0);
  const double kn = std::sqrt(oracle::simpson([](double z) { return std::exp(-4.0 * z * z); }, -10, 10, 4000));
  for (double z : {0.0, 0.4, -1.1}) CHECK_THAT(k0.scalar(z), WithinAbs(std::exp(-2.0 * z * z) / kn, 1e-12));
  CHECK_THAT(l2_norm(k0), WithinAbs(1.0, 1e-10));
  CHECK_FALSE(k0.spinor());
}

TEST_CASE("KG profiles solve the scalar transverse problem") {
  // (−∂² + μ²z² − μ) φ = 2mμ φ
  const double h = 1e-4;
  for (int m = 0; m <= 4; ++m)
    for (double mu : {1.0, 2.5}) {
      const TransverseProfile p(BranchSpec::create(Model::KleinGordon, m, 1), 0.3, mu);
      for (double z = -5.0; z <= 5.0; z += 0.1) {
        const double d2 = (p.scalar(z + h) - 2 * p.scalar(z) + p.scalar(z - h)) / (h * h);
        const double lhs = -d2 + (mu * mu * z * z - mu) * p.scalar(z);
        CHECK_THAT(lhs, WithinAbs(2.0 * m * mu * p.scalar(z), 2e-5));
      }
    }
}
