#pragma once

#include <cmath>
#include <optional>
#include <string>

#include "edgewave/core/error.hpp"

namespace edgewave {

enum class Model { Dirac, KleinGordon };

inline std::string to_string(Model m) { return m == Model::Dirac ? "dirac" : "kg"; }

/// Operator selection and semiclassical parameter. q = 1 for Dirac, q = 2 for KG.
struct ModelSpec {
  Model model = Model::Dirac;
  int q = 1;
  double epsilon = 0.01;

  static ModelSpec make(Model model, double epsilon) {
    ModelSpec s{model, model == Model::Dirac ? 1 : 2, epsilon};
    s.validate();
    return s;
  }
  static ModelSpec dirac(double epsilon) { return make(Model::Dirac, epsilon); }
  static ModelSpec klein_gordon(double epsilon) { return make(Model::KleinGordon, epsilon); }

  void validate() const {
    if ((model == Model::Dirac) != (q == 1) || (model == Model::KleinGordon) != (q == 2))
      fail(ErrorCode::ConfigError, "q must be 1 for Dirac and 2 for Klein-Gordon");
    if (!(epsilon > 0.0 && epsilon <= 0.25)) fail(ErrorCode::ConfigError, "epsilon must lie in (0, 0.25]");
  }
};

enum class BranchKind { Relativistic, Dispersive };

/// Transverse mode m with energy sign s. Dirac m = 0 exists only as the
/// negative-chirality mode E = −ξ; asking for (0, +) throws InvalidBranch.
/// KG m = 0 is the pair E = ±|ξ|, which travels at speed ±sgn(ξ).
class BranchSpec {
 public:
  static BranchSpec create(Model model, int m, int sign) {
    if (m < 0) fail(ErrorCode::InvalidBranch, "branch index m must be nonnegative");
    if (sign != 1 && sign != -1) fail(ErrorCode::InvalidBranch, "branch sign must be +1 or -1");
    if (model == Model::Dirac && m == 0 && sign == 1)
      fail(ErrorCode::InvalidBranch, "Dirac m = 0 carries only the negative-chirality branch");
    return BranchSpec(model, m, sign);
  }
  static BranchSpec dirac_relativistic() { return BranchSpec(Model::Dirac, 0, -1); }

  Model model() const { return model_; }
  int m() const { return m_; }
  int sign() const { return s_; }
  BranchKind kind() const { return m_ == 0 ? BranchKind::Relativistic : BranchKind::Dispersive; }
  bool relativistic() const { return m_ == 0; }

  std::string label() const {
    return to_string(model_) + "(" + std::to_string(m_) + "," + (s_ > 0 ? "+" : "-") + ")";
  }

  bool operator==(const BranchSpec&) const = default;

 private:
  BranchSpec(Model model, int m, int s) : model_(model), m_(m), s_(s) {}
  Model model_;
  int m_;
  int s_;
};

inline void require_slope(double mu) {
  if (!(mu > 0.0)) fail(ErrorCode::OutOfRange, "wall slope must be positive");
}

/// E_{m,s}(ξ) on a wall of slope μ.
inline double dispersion(const BranchSpec& b, double xi, double mu) {
  require_slope(mu);
  if (b.model() == Model::Dirac && b.m() == 0) return -xi;
  return b.sign() * std::sqrt(2.0 * b.m() * mu + xi * xi);
}

inline double dispersion(const ModelSpec& model, const BranchSpec& b, double xi, double mu) {
  if (model.model != b.model()) fail(ErrorCode::InvalidBranch, "branch belongs to a different model");
  return dispersion(b, xi, mu);
}

/// ∂_ξE.
inline double group_velocity(const BranchSpec& b, double xi, double mu) {
  require_slope(mu);
  if (b.model() == Model::Dirac && b.m() == 0) return -1.0;
  const double e = dispersion(b, xi, mu);
  if (e == 0.0) fail(ErrorCode::ZeroEnergy, "group velocity undefined where E = 0", {xi});
  return xi / e;
}

inline double group_velocity(const ModelSpec& model, const BranchSpec& b, double xi, double mu) {
  if (model.model != b.model()) fail(ErrorCode::InvalidBranch, "branch belongs to a different model");
  return group_velocity(b, xi, mu);
}

/// ∂²_ξE = 2mμ / E³ (zero on the relativistic branches away from ξ = 0).
inline double dispersion_curvature(const BranchSpec& b, double xi, double mu) {
  require_slope(mu);
  if (b.m() == 0) return 0.0;
  const double e = dispersion(b, xi, mu);
  return 2.0 * b.m() * mu / (e * e * e);
}

}  // namespace edgewave
