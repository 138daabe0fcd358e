#pragma once

#include <string>
#include <type_traits>
#include <variant>

#include "edgewave/core/error.hpp"
#include "edgewave/geometry/expr.hpp"

namespace edgewave {

/// The mass term κ(x, y) whose zero level set is the interface.
class DomainWall {
 public:
  struct FlatY {};
  struct Circle {
    double radius = 1.0;
  };
  struct Analytic {
    Expression expr;
  };
  using Kind = std::variant<FlatY, Circle, Analytic>;

  DomainWall() = default;
  DomainWall(Kind kind, Rect bounds) : kind_(std::move(kind)), bounds_(bounds) {}

  /// κ = y
  static DomainWall flat(Rect bounds = {-4, 4, -2, 2}) { return {FlatY{}, bounds}; }
  /// κ = x² + y² − R²
  static DomainWall circle(double radius = 1.0, Rect bounds = {-2, 2, -2, 2}) {
    if (!(radius > 0.0)) fail(ErrorCode::ConfigError, "wall.radius must be positive");
    return {Circle{radius}, bounds};
  }
  static DomainWall analytic(const std::string& expression, Rect bounds) {
    return {Analytic{Expression::parse(expression)}, bounds};
  }

  const Kind& kind() const { return kind_; }
  const Rect& bounds() const { return bounds_; }

  std::string name() const {
    return std::visit(
        [](const auto& k) -> std::string {
          using K = std::decay_t<decltype(k)>;
          if constexpr (std::is_same_v<K, FlatY>) return "flat";
          else if constexpr (std::is_same_v<K, Circle>) return "circle";
          else return "expr";
        },
        kind_);
  }

  Jet2 eval(Point p) const {
    return std::visit(
        [&](const auto& k) -> Jet2 {
          using K = std::decay_t<decltype(k)>;
          if constexpr (std::is_same_v<K, FlatY>) {
            return Jet2::var_y(p.y);
          } else if constexpr (std::is_same_v<K, Circle>) {
            return {p.x * p.x + p.y * p.y - k.radius * k.radius, {2 * p.x, 2 * p.y}, 2, 0, 2};
          } else {
            return k.expr.eval(p);
          }
        },
        kind_);
  }

  double value(Point p) const { return eval(p).v; }
  Vec2 gradient(Point p) const { return eval(p).g; }

 private:
  Kind kind_ = FlatY{};
  Rect bounds_{-4, 4, -2, 2};
};

}  // namespace edgewave
