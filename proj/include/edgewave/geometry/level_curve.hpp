#pragma once

#include <algorithm>
#include <cmath>
#include <limits>
#include <ostream>
#include <vector>

#include "edgewave/core/error.hpp"
#include "edgewave/core/quadrature.hpp"
#include "edgewave/core/types.hpp"
#include "edgewave/geometry/domain_wall.hpp"
#include "edgewave/geometry/spline.hpp"

namespace edgewave {

/// One traced point of Γ. The frame is (tangent, normal) with det = +1 and the
/// normal along ∇κ, so the wall slope ∇κ·ν is |∇κ| > 0. Curvature is signed,
/// tangent' = curvature · normal.
struct CurveSample {
  double s = 0.0;
  Point point{};
  Vec2 tangent{};
  Vec2 normal{};
  double curvature = 0.0;
  double slope = 0.0;
  double angle = 0.0;  ///< unwrapped angle of the tangent
};

struct TraceOptions {
  double newton_tol = 1e-14;       ///< projection stops when |κ|/|∇κ| falls below this
  int max_newton = 60;
  double max_seed_distance = 0.5;  ///< first-order distance |κ|/|∇κ| allowed at the seed
  double grad_min = 1e-8;
  double curve_tol = 1e-10;
};

/// Arclength-parametrized zero level set. Immutable once built.
class LevelCurve {
 public:
  LevelCurve() = default;

  /// `samples` sorted by s. For closed curves the first sample sits at s = 0 and
  /// `total_length` is the period; the closing knot is added internally.
  LevelCurve(std::vector<CurveSample> samples, bool closed, double total_length)
      : samples_(std::move(samples)), closed_(closed), length_(total_length) {
    build();
  }

  const std::vector<CurveSample>& samples() const { return samples_; }
  bool closed() const { return closed_; }
  /// Period for closed curves, +inf for open ones.
  double total_length() const { return closed_ ? length_ : std::numeric_limits<double>::infinity(); }
  double s_min() const { return closed_ ? 0.0 : samples_.front().s; }
  double s_max() const { return closed_ ? length_ : samples_.back().s; }
  double max_abs_curvature() const { return max_abs_k_; }
  double min_slope() const { return min_mu_; }
  /// Turning of the tangent over one period (±2π for a simple closed curve).
  double total_turning() const { return turning_; }

  bool in_range(double s) const { return closed_ || (s >= s_min() && s <= s_max()); }

  /// Representative of s in [0, L) for closed curves; identity for open ones.
  double reduce(double s) const {
    if (!closed_) return s;
    double r = std::fmod(s, length_);
    if (r < 0) r += length_;
    if (r >= length_) r -= length_;
    return r;
  }

  Point point(double s) const { return gamma_.eval(checked(s), 0); }
  /// d^order γ / ds^order of the interpolant.
  Vec2 derivative(double s, int order) const { return gamma_.eval(checked(s), order); }
  Vec2 tangent(double s) const { return normalized(gamma_.eval(checked(s), 1)); }
  Vec2 normal(double s) const { return rot90(tangent(s)); }
  double curvature(double s) const { return k_(checked(s)); }
  double slope(double s) const { return mu_(checked(s)); }

  /// Tangent angle, continuous in s across periods of a closed curve.
  double frame_angle(double s) const {
    if (!in_range(s)) fail(ErrorCode::OutOfRange, "arclength outside traced curve");
    if (!closed_) return theta_(s) + winding_rate_ * s;
    const double n = std::floor(s / length_);
    const double r = s - n * length_;
    return theta_(r) + winding_rate_ * r + n * turning_;
  }

  void write_csv(std::ostream& os) const {
    os << "x̃,x,y,τx,τy,νx,νy,k,μ\n";
    os.precision(17);
    for (const auto& c : samples_)
      os << c.s << ',' << c.point.x << ',' << c.point.y << ',' << c.tangent.x << ','
         << c.tangent.y << ',' << c.normal.x << ',' << c.normal.y << ',' << c.curvature << ','
         << c.slope << '\n';
  }

 private:
  double checked(double s) const {
    if (!in_range(s)) fail(ErrorCode::OutOfRange, "arclength outside traced curve");
    return reduce(s);
  }

  void build() {
    if (samples_.size() < 3) fail(ErrorCode::NoConvergence, "level curve needs >= 3 samples");
    std::vector<double> s;
    std::vector<Vec2> p, d1, d2;
    std::vector<double> k, mu, th;
    for (const auto& c : samples_) {
      s.push_back(c.s);
      p.push_back(c.point);
      d1.push_back(c.tangent);
      d2.push_back(c.curvature * c.normal);
      k.push_back(c.curvature);
      mu.push_back(c.slope);
      th.push_back(c.angle);
    }
    if (closed_) {
      const auto& c = samples_.front();
      s.push_back(length_);
      p.push_back(c.point);
      d1.push_back(c.tangent);
      d2.push_back(c.curvature * c.normal);
      k.push_back(c.curvature);
      mu.push_back(c.slope);
      // unwrap the closing tangent relative to the last sample
      double a = c.angle;
      const double last = samples_.back().angle;
      while (a - last > pi) a -= 2 * pi;
      while (a - last < -pi) a += 2 * pi;
      th.push_back(a);
      turning_ = a - samples_.front().angle;
      winding_rate_ = turning_ / length_;
    } else {
      winding_rate_ = 0.0;
    }
    std::vector<double> th_detrended(th.size());
    for (std::size_t i = 0; i < th.size(); ++i) th_detrended[i] = th[i] - winding_rate_ * s[i];
    gamma_ = QuinticHermiteCurve(s, p, d1, d2);
    k_ = CubicSpline(s, k, closed_);
    mu_ = CubicSpline(s, mu, closed_);
    theta_ = CubicSpline(s, th_detrended, closed_);
    max_abs_k_ = 0.0;
    min_mu_ = std::numeric_limits<double>::infinity();
    for (const auto& c : samples_) {
      max_abs_k_ = std::max(max_abs_k_, std::abs(c.curvature));
      min_mu_ = std::min(min_mu_, c.slope);
    }
  }

  std::vector<CurveSample> samples_;
  bool closed_ = false;
  double length_ = 0.0;
  double turning_ = 0.0;
  double winding_rate_ = 0.0;
  double max_abs_k_ = 0.0;
  double min_mu_ = 0.0;
  QuinticHermiteCurve gamma_;
  CubicSpline k_, mu_, theta_;
};

namespace detail {

inline CurveSample frame_at(const DomainWall& wall, Point p, const TraceOptions& opt) {
  const Jet2 j = wall.eval(p);
  const double g = norm(j.g);
  if (!(g >= opt.grad_min)) fail(ErrorCode::DegenerateGradient, "|grad kappa| vanishes on the level set");
  CurveSample c;
  c.point = p;
  c.normal = j.g / g;
  c.tangent = rot270(c.normal);
  c.slope = g;
  c.curvature = -j.hess(c.tangent, c.tangent) / g;
  c.angle = std::atan2(c.tangent.y, c.tangent.x);
  return c;
}

/// Newton projection along ∇κ onto κ = 0.
inline Point project(const DomainWall& wall, Point p, const TraceOptions& opt, double max_first_step) {
  for (int it = 0; it < opt.max_newton; ++it) {
    const Jet2 j = wall.eval(p);
    const double g2 = dot(j.g, j.g);
    if (!(g2 >= opt.grad_min * opt.grad_min))
      fail(ErrorCode::DegenerateGradient, "|grad kappa| below threshold during projection");
    const double dist = std::abs(j.v) / std::sqrt(g2);
    if (it == 0 && dist > max_first_step)
      fail(ErrorCode::NoConvergence, "seed too far from the level set (|kappa|/|grad kappa| = " +
                                         std::to_string(dist) + ")");
    if (dist < opt.newton_tol) return p;
    p -= (j.v / g2) * j.g;
  }
  const Jet2 j = wall.eval(p);
  if (std::abs(j.v) / norm(j.g) < 1e3 * opt.newton_tol) return p;
  fail(ErrorCode::NoConvergence, "Newton projection onto the level set did not converge");
}

/// Arclength of the quintic Hermite segment between two samples, found by fixed
/// point on the parameter scaling.
inline double segment_length(const CurveSample& a, const CurveSample& b) {
  double L = norm(b.point - a.point);
  const auto& ref = quad::gauss_legendre_cached(12);
  for (int it = 0; it < 6; ++it) {
    double sum = 0.0;
    for (std::size_t q = 0; q < ref.size(); ++q) {
      const double u = 0.5 * (ref.nodes[q] + 1.0);
      double bs[6];
      QuinticHermiteCurve::basis(u, 1, bs);
      const Vec2 d = bs[0] * a.point + bs[1] * b.point + (L * bs[2]) * a.tangent +
                     (L * bs[3]) * b.tangent + (L * L * bs[4] * a.curvature) * a.normal +
                     (L * L * bs[5] * b.curvature) * b.normal;
      sum += 0.5 * ref.weights[q] * norm(d);
    }
    if (std::abs(sum - L) < 1e-15) return sum;
    L = sum;
  }
  return L;
}

}  // namespace detail

/// Traces Γ = κ⁻¹(0) from a seed by tangent-predictor / Newton-corrector steps.
///
/// The seed projection defines x̃ = 0. A curve that returns to the seed with a
/// matching tangent is closed; otherwise tracing runs max_length/2 in each
/// direction, stopping early where Γ leaves the wall's domain bounds.
inline LevelCurve trace_level_set(const DomainWall& wall, Point seed, double step,
                                  double max_length, const TraceOptions& opt = {}) {
  if (!(step > 0.0) || !(max_length > step))
    fail(ErrorCode::ConfigError, "trace step and max_length must be positive with max_length > step");
  const Rect& box = wall.bounds();
  const Point start = detail::project(wall, seed, opt, opt.max_seed_distance);
  if (!box.contains(start)) fail(ErrorCode::CurveLeavesDomain, "seed projection lies outside the domain");
  const CurveSample first = detail::frame_at(wall, start, opt);

  auto march = [&](double dir, double budget, bool allow_close, bool& closed) {
    std::vector<CurveSample> out;
    CurveSample cur = first;
    double travelled = 0.0;
    closed = false;
    const auto max_steps = static_cast<std::size_t>(budget / step) + 8;
    for (std::size_t n = 0; n < max_steps && travelled < budget; ++n) {
      if (allow_close && n >= 3) {
        const Vec2 to_seed = first.point - cur.point;
        if (norm(to_seed) < 1.5 * step && dot(to_seed, cur.tangent) * dir > 0.0 &&
            dot(cur.tangent, first.tangent) > 0.5) {
          closed = true;
          break;
        }
      }
      const Point pred = cur.point + (dir * step) * cur.tangent + (0.5 * step * step * cur.curvature) * cur.normal;
      const Point next = detail::project(wall, pred, opt, 4.0 * step);
      if (!box.contains(next)) break;
      CurveSample c = detail::frame_at(wall, next, opt);
      double a = c.angle;
      while (a - cur.angle > pi) a -= 2 * pi;
      while (a - cur.angle < -pi) a += 2 * pi;
      c.angle = a;
      travelled += norm(next - cur.point);
      out.push_back(c);
      cur = c;
    }
    return out;
  };

  bool closed = false;
  std::vector<CurveSample> fwd = march(+1.0, max_length, true, closed);
  std::vector<CurveSample> samples;
  if (closed) {
    samples.reserve(fwd.size() + 1);
    samples.push_back(first);
    samples.front().s = 0.0;
    for (auto& c : fwd) {
      c.s = samples.back().s + detail::segment_length(samples.back(), c);
      samples.push_back(c);
    }
    const double length = samples.back().s + detail::segment_length(samples.back(), first);
    for (const auto& c : samples)
      if (std::abs(wall.value(c.point)) > opt.curve_tol)
        fail(ErrorCode::NoConvergence, "traced sample off the level set");
    return LevelCurve(std::move(samples), true, length);
  }

  // open curve: keep half the budget forward, then trace backward
  {
    double acc = 0.0;
    Point prev = first.point;
    std::size_t keep = 0;
    for (; keep < fwd.size(); ++keep) {
      acc += norm(fwd[keep].point - prev);
      prev = fwd[keep].point;
      if (acc > 0.5 * max_length) break;
    }
    fwd.resize(std::min(fwd.size(), keep + 1));
  }
  bool dummy = false;
  std::vector<CurveSample> bwd = march(-1.0, 0.5 * max_length, false, dummy);
  if (fwd.size() + bwd.size() < 2)
    fail(ErrorCode::CurveLeavesDomain, "level set leaves the domain immediately");

  samples.reserve(fwd.size() + bwd.size() + 1);
  for (auto it = bwd.rbegin(); it != bwd.rend(); ++it) samples.push_back(*it);
  const std::size_t origin = samples.size();
  samples.push_back(first);
  samples.insert(samples.end(), fwd.begin(), fwd.end());
  samples[origin].s = 0.0;
  for (std::size_t i = origin + 1; i < samples.size(); ++i)
    samples[i].s = samples[i - 1].s + detail::segment_length(samples[i - 1], samples[i]);
  for (std::size_t i = origin; i-- > 0;)
    samples[i].s = samples[i + 1].s - detail::segment_length(samples[i], samples[i + 1]);
  for (const auto& c : samples)
    if (std::abs(wall.value(c.point)) > opt.curve_tol)
      fail(ErrorCode::NoConvergence, "traced sample off the level set");
  const double span = samples.back().s - samples.front().s;
  return LevelCurve(std::move(samples), false, span);
}

/// Wall slope μ(x̃) = ∇κ·ν, interpolated between samples.
inline double wall_slope(const LevelCurve& curve, double s) {
  const double mu = curve.slope(s);
  if (!(mu > 0.0)) fail(ErrorCode::OutOfRange, "non-positive wall slope");
  return mu;
}

}  // namespace edgewave
