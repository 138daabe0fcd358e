#pragma once

#include <cmath>
#include <cstdint>
#include <limits>
#include <memory>
#include <optional>
#include <unordered_map>
#include <vector>

#include "edgewave/core/error.hpp"
#include "edgewave/core/types.hpp"
#include "edgewave/geometry/level_curve.hpp"

namespace edgewave {

struct TubeCoords {
  double s = 0.0;   ///< arclength x̃
  double yt = 0.0;  ///< signed normal distance ỹ
};

/// Tubular coordinates Φ(x̃, ỹ) = γ(x̃) + ỹ ν(x̃) around Γ.
///
/// For a closed Γ the map is a covering: x̃ and x̃ + L have the same image and the
/// inverse returns the representative in [0, L).
class RectificationMap {
 public:
  RectificationMap() = default;

  explicit RectificationMap(std::shared_ptr<const LevelCurve> curve,
                            std::optional<double> eta = std::nullopt,
                            std::optional<Rect> bounds = std::nullopt)
      : curve_(std::move(curve)) {
    if (!curve_) fail(ErrorCode::ConfigError, "rectification needs a curve");
    eta_ = eta ? *eta : default_eta(*curve_, bounds);
    if (!(eta_ > 0.0)) fail(ErrorCode::ConfigError, "tube half-width eta must be positive");
    if (!(eta_ * curve_->max_abs_curvature() < 1.0))
      fail(ErrorCode::ConfigError, "eta * max|k| must stay below 1");
    build_index();
  }

  /// min(0.4 / max|k|, distance of Γ to the domain boundary) / 2, the distance
  /// being measured along ±ν from each sample.
  static double default_eta(const LevelCurve& curve, std::optional<Rect> bounds) {
    double e = std::numeric_limits<double>::infinity();
    if (curve.max_abs_curvature() > 0.0) e = 0.4 / curve.max_abs_curvature();
    if (bounds) {
      for (const auto& c : curve.samples()) {
        e = std::min(e, ray_to_boundary(*bounds, c.point, c.normal));
        e = std::min(e, ray_to_boundary(*bounds, c.point, -c.normal));
      }
    }
    if (!std::isfinite(e)) e = 1.0;
    return 0.5 * e;
  }

  static double ray_to_boundary(const Rect& b, Point p, Vec2 n) {
    double t = std::numeric_limits<double>::infinity();
    if (n.x > 1e-14) t = std::min(t, (b.x_max - p.x) / n.x);
    if (n.x < -1e-14) t = std::min(t, (b.x_min - p.x) / n.x);
    if (n.y > 1e-14) t = std::min(t, (b.y_max - p.y) / n.y);
    if (n.y < -1e-14) t = std::min(t, (b.y_min - p.y) / n.y);
    return std::max(t, 0.0);
  }

  const LevelCurve& curve() const { return *curve_; }
  std::shared_ptr<const LevelCurve> curve_ptr() const { return curve_; }
  double eta() const { return eta_; }

  Point forward(double s, double yt) const {
    if (std::abs(yt) > 2.0 * eta_) fail(ErrorCode::OutsideTube, "|y~| exceeds 2 eta");
    if (!curve_->in_range(s)) fail(ErrorCode::OutsideTube, "x~ outside the traced curve");
    return curve_->point(s) + yt * curve_->normal(s);
  }

  /// 1 − ỹ k(x̃).
  double jacobian(double s, double yt) const { return 1.0 - yt * curve_->curvature(s); }

  /// Inverse within the tube; nullopt for points farther than 2η from Γ.
  std::optional<TubeCoords> try_inverse(Point p) const {
    const auto& smp = curve_->samples();
    const double reach = 2.0 * eta_ + cell_pad_;
    const auto [ci, cj] = cell_of(p);
    std::size_t best = smp.size();
    double best_d2 = reach * reach;
    for (std::int64_t di = -1; di <= 1; ++di) {
      for (std::int64_t dj = -1; dj <= 1; ++dj) {
        auto it = index_.find(key(ci + di, cj + dj));
        if (it == index_.end()) continue;
        for (std::size_t k : it->second) {
          const Vec2 d = p - smp[k].point;
          const double d2 = dot(d, d);
          if (d2 < best_d2) {
            best_d2 = d2;
            best = k;
          }
        }
      }
    }
    if (best == smp.size()) return std::nullopt;

    const LevelCurve& c = *curve_;
    double s = smp[best].s;
    double lo = best > 0 ? smp[best - 1].s : (c.closed() ? smp.back().s - c.total_length() : smp[best].s);
    double hi = best + 1 < smp.size() ? smp[best + 1].s : (c.closed() ? c.total_length() : smp[best].s);
    auto resid = [&](double t) {
      const Vec2 d1 = c.derivative(t, 1);
      return dot(p - c.point(t), d1);
    };
    double flo = resid(lo);
    const double fhi = resid(hi);
    if (flo * fhi > 0.0) return std::nullopt;  // foot point beyond an open end
    for (int it = 0; it < 80; ++it) {
      const Vec2 d1 = c.derivative(s, 1), d2 = c.derivative(s, 2);
      const Vec2 r = p - c.point(s);
      const double f = dot(r, d1);
      if (std::abs(f) < 1e-15) break;
      if ((f > 0) == (flo > 0)) {
        lo = s;
        flo = f;
      } else {
        hi = s;
      }
      const double fp = -dot(d1, d1) + dot(r, d2);
      double next = s - f / fp;
      if (!(next > lo && next < hi)) next = 0.5 * (lo + hi);
      if (std::abs(next - s) < 1e-16 * (1.0 + std::abs(s))) {
        s = next;
        break;
      }
      s = next;
    }
    s = c.reduce(s);
    const double yt = dot(p - c.point(s), c.normal(s));
    if (std::abs(yt) > 2.0 * eta_) return std::nullopt;
    return TubeCoords{s, yt};
  }

  TubeCoords inverse(Point p) const {
    auto r = try_inverse(p);
    if (!r) fail(ErrorCode::OutsideTube, "point farther than 2 eta from the interface");
    const Point back = forward(r->s, r->yt);
    if (norm(back - p) > 1e-10) fail(ErrorCode::NoConvergence, "tube inversion did not converge");
    return *r;
  }

 private:
  static std::int64_t key(std::int64_t i, std::int64_t j) { return (i << 32) ^ (j & 0xffffffff); }

  std::pair<std::int64_t, std::int64_t> cell_of(Point p) const {
    return {static_cast<std::int64_t>(std::floor(p.x / cell_)),
            static_cast<std::int64_t>(std::floor(p.y / cell_))};
  }

  void build_index() {
    const auto& smp = curve_->samples();
    double max_gap = 0.0;
    for (std::size_t i = 1; i < smp.size(); ++i) max_gap = std::max(max_gap, norm(smp[i].point - smp[i - 1].point));
    cell_pad_ = max_gap;
    cell_ = 2.0 * eta_ + cell_pad_;
    for (std::size_t k = 0; k < smp.size(); ++k) {
      auto [i, j] = cell_of(smp[k].point);
      index_[key(i, j)].push_back(k);
    }
  }

  std::shared_ptr<const LevelCurve> curve_;
  double eta_ = 0.0;
  double cell_ = 1.0;
  double cell_pad_ = 0.0;
  std::unordered_map<std::int64_t, std::vector<std::size_t>> index_;
};

inline Point phi_forward(const RectificationMap& map, double s, double yt) { return map.forward(s, yt); }
inline TubeCoords phi_inverse(const RectificationMap& map, Point p) { return map.inverse(p); }

}  // namespace edgewave
