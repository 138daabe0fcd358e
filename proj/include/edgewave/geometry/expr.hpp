#pragma once

#include <cctype>
#include <cmath>
#include <memory>
#include <string>
#include <utility>
#include <vector>

#include "edgewave/core/error.hpp"
#include "edgewave/core/types.hpp"

namespace edgewave {

/// Value, gradient and Hessian of a scalar function of (x, y), propagated exactly
/// through arithmetic. Evaluating an expression tree on jets gives closed-form
/// derivatives without symbolic manipulation.
struct Jet2 {
  double v = 0.0;
  Vec2 g{};
  double hxx = 0.0, hxy = 0.0, hyy = 0.0;

  static Jet2 constant(double c) { return {c, {}, 0, 0, 0}; }
  static Jet2 var_x(double x) { return {x, {1, 0}, 0, 0, 0}; }
  static Jet2 var_y(double y) { return {y, {0, 1}, 0, 0, 0}; }

  /// aᵀ H b.
  double hess(Vec2 a, Vec2 b) const {
    return a.x * (hxx * b.x + hxy * b.y) + a.y * (hxy * b.x + hyy * b.y);
  }

  friend Jet2 operator+(const Jet2& a, const Jet2& b) {
    return {a.v + b.v, a.g + b.g, a.hxx + b.hxx, a.hxy + b.hxy, a.hyy + b.hyy};
  }
  friend Jet2 operator-(const Jet2& a, const Jet2& b) {
    return {a.v - b.v, a.g - b.g, a.hxx - b.hxx, a.hxy - b.hxy, a.hyy - b.hyy};
  }
  friend Jet2 operator-(const Jet2& a) { return {-a.v, -a.g, -a.hxx, -a.hxy, -a.hyy}; }
  friend Jet2 operator*(const Jet2& a, const Jet2& b) {
    return {a.v * b.v,
            a.v * b.g + b.v * a.g,
            a.v * b.hxx + b.v * a.hxx + 2.0 * a.g.x * b.g.x,
            a.v * b.hxy + b.v * a.hxy + a.g.x * b.g.y + a.g.y * b.g.x,
            a.v * b.hyy + b.v * a.hyy + 2.0 * a.g.y * b.g.y};
  }
};

/// Chain rule for f(a) given f, f', f'' at a.v.
inline Jet2 apply(const Jet2& a, double f, double df, double d2f) {
  return {f,
          df * a.g,
          df * a.hxx + d2f * a.g.x * a.g.x,
          df * a.hxy + d2f * a.g.x * a.g.y,
          df * a.hyy + d2f * a.g.y * a.g.y};
}

inline Jet2 operator/(const Jet2& a, const Jet2& b) {
  const double inv = 1.0 / b.v;
  return a * apply(b, inv, -inv * inv, 2.0 * inv * inv * inv);
}

inline Jet2 sin(const Jet2& a) { return apply(a, std::sin(a.v), std::cos(a.v), -std::sin(a.v)); }
inline Jet2 cos(const Jet2& a) { return apply(a, std::cos(a.v), -std::sin(a.v), -std::cos(a.v)); }
inline Jet2 exp(const Jet2& a) {
  const double e = std::exp(a.v);
  return apply(a, e, e, e);
}
inline Jet2 log(const Jet2& a) { return apply(a, std::log(a.v), 1.0 / a.v, -1.0 / (a.v * a.v)); }
inline Jet2 sqrt(const Jet2& a) {
  const double s = std::sqrt(a.v);
  return apply(a, s, 0.5 / s, -0.25 / (s * a.v));
}
inline Jet2 tanh(const Jet2& a) {
  const double t = std::tanh(a.v);
  const double d = 1.0 - t * t;
  return apply(a, t, d, -2.0 * t * d);
}
inline Jet2 atan(const Jet2& a) {
  const double d = 1.0 / (1.0 + a.v * a.v);
  return apply(a, std::atan(a.v), d, -2.0 * a.v * d * d);
}
inline Jet2 pow(const Jet2& a, double p) {
  if (p == 0.0) return Jet2::constant(1.0);
  return apply(a, std::pow(a.v, p), p * std::pow(a.v, p - 1.0),
               p * (p - 1.0) * std::pow(a.v, p - 2.0));
}

/// Parsed analytic expression in the variables x and y.
///
/// Grammar: sums and products of numbers, `x`, `y`, `pi`, parentheses, `^` (right
/// associative), unary minus, and the functions sin cos exp log sqrt tanh atan.
class Expression {
 public:
  Expression() = default;

  static Expression parse(const std::string& text) {
    Parser p{text, 0};
    Expression e;
    e.source_ = text;
    e.root_ = p.parse_expr();
    p.skip_ws();
    if (p.pos != text.size())
      fail(ErrorCode::ConfigError,
           "wall.expression: unexpected '" + text.substr(p.pos, 1) + "' at offset " +
               std::to_string(p.pos) + " in \"" + text + "\"");
    return e;
  }

  const std::string& source() const { return source_; }
  bool empty() const { return !root_; }

  Jet2 eval(Point p) const { return eval_node(*root_, p); }

 private:
  enum class Op { Num, X, Y, Add, Sub, Mul, Div, Pow, Neg, Func };
  enum class Fn { Sin, Cos, Exp, Log, Sqrt, Tanh, Atan };

  struct Node {
    Op op = Op::Num;
    double value = 0.0;
    Fn fn = Fn::Sin;
    std::shared_ptr<const Node> lhs, rhs;
  };
  using NodePtr = std::shared_ptr<const Node>;

  static NodePtr make(Op op, NodePtr l = nullptr, NodePtr r = nullptr) {
    auto n = std::make_shared<Node>();
    n->op = op;
    n->lhs = std::move(l);
    n->rhs = std::move(r);
    return n;
  }

  struct Parser {
    const std::string& s;
    std::size_t pos;

    void skip_ws() {
      while (pos < s.size() && std::isspace(static_cast<unsigned char>(s[pos]))) ++pos;
    }
    bool accept(char c) {
      skip_ws();
      if (pos < s.size() && s[pos] == c) {
        ++pos;
        return true;
      }
      return false;
    }
    [[noreturn]] void error(const std::string& msg) {
      fail(ErrorCode::ConfigError, "wall.expression: " + msg + " at offset " +
                                       std::to_string(pos) + " in \"" + s + "\"");
    }

    NodePtr parse_expr() {
      NodePtr lhs = parse_term();
      for (;;) {
        if (accept('+')) lhs = make(Op::Add, lhs, parse_term());
        else if (accept('-')) lhs = make(Op::Sub, lhs, parse_term());
        else return lhs;
      }
    }
    NodePtr parse_term() {
      NodePtr lhs = parse_unary();
      for (;;) {
        if (accept('*')) lhs = make(Op::Mul, lhs, parse_unary());
        else if (accept('/')) lhs = make(Op::Div, lhs, parse_unary());
        else return lhs;
      }
    }
    NodePtr parse_unary() {
      if (accept('-')) return make(Op::Neg, parse_unary());
      if (accept('+')) return parse_unary();
      return parse_power();
    }
    NodePtr parse_power() {
      NodePtr base = parse_primary();
      if (accept('^')) return make(Op::Pow, base, parse_unary());
      return base;
    }
    NodePtr parse_primary() {
      skip_ws();
      if (pos >= s.size()) error("unexpected end of expression");
      const char c = s[pos];
      if (c == '(') {
        ++pos;
        NodePtr e = parse_expr();
        if (!accept(')')) error("missing ')'");
        return e;
      }
      if (std::isdigit(static_cast<unsigned char>(c)) || c == '.') {
        std::size_t used = 0;
        double v = 0.0;
        try {
          v = std::stod(s.substr(pos), &used);
        } catch (const std::exception&) {
          error("malformed number");
        }
        pos += used;
        auto n = std::make_shared<Node>();
        n->op = Op::Num;
        n->value = v;
        return n;
      }
      if (std::isalpha(static_cast<unsigned char>(c))) {
        std::size_t start = pos;
        while (pos < s.size() && (std::isalnum(static_cast<unsigned char>(s[pos])) || s[pos] == '_'))
          ++pos;
        const std::string id = s.substr(start, pos - start);
        if (id == "x") return make(Op::X);
        if (id == "y") return make(Op::Y);
        if (id == "pi") {
          auto n = std::make_shared<Node>();
          n->value = pi;
          return n;
        }
        static const std::pair<const char*, Fn> table[] = {
            {"sin", Fn::Sin},   {"cos", Fn::Cos},   {"exp", Fn::Exp},  {"log", Fn::Log},
            {"sqrt", Fn::Sqrt}, {"tanh", Fn::Tanh}, {"atan", Fn::Atan}};
        for (const auto& [name, fn] : table) {
          if (id == name) {
            if (!accept('(')) error("expected '(' after " + id);
            NodePtr arg = parse_expr();
            if (!accept(')')) error("missing ')'");
            auto n = std::make_shared<Node>();
            n->op = Op::Func;
            n->fn = fn;
            n->lhs = arg;
            return n;
          }
        }
        pos = start;
        error("unknown identifier '" + id + "'");
      }
      error(std::string("unexpected character '") + c + "'");
    }
  };

  static bool is_constant(const Node& n) {
    switch (n.op) {
      case Op::Num: return true;
      case Op::X:
      case Op::Y: return false;
      case Op::Neg:
      case Op::Func: return is_constant(*n.lhs);
      default: return is_constant(*n.lhs) && is_constant(*n.rhs);
    }
  }

  static Jet2 eval_node(const Node& n, Point p) {
    switch (n.op) {
      case Op::Num: return Jet2::constant(n.value);
      case Op::X: return Jet2::var_x(p.x);
      case Op::Y: return Jet2::var_y(p.y);
      case Op::Add: return eval_node(*n.lhs, p) + eval_node(*n.rhs, p);
      case Op::Sub: return eval_node(*n.lhs, p) - eval_node(*n.rhs, p);
      case Op::Mul: return eval_node(*n.lhs, p) * eval_node(*n.rhs, p);
      case Op::Div: return eval_node(*n.lhs, p) / eval_node(*n.rhs, p);
      case Op::Neg: return -eval_node(*n.lhs, p);
      case Op::Pow: {
        const Jet2 base = eval_node(*n.lhs, p);
        if (is_constant(*n.rhs)) return pow(base, eval_node(*n.rhs, p).v);
        return exp(eval_node(*n.rhs, p) * log(base));
      }
      case Op::Func: {
        const Jet2 a = eval_node(*n.lhs, p);
        switch (n.fn) {
          case Fn::Sin: return sin(a);
          case Fn::Cos: return cos(a);
          case Fn::Exp: return exp(a);
          case Fn::Log: return log(a);
          case Fn::Sqrt: return sqrt(a);
          case Fn::Tanh: return tanh(a);
          case Fn::Atan: return atan(a);
        }
      }
    }
    return {};
  }

  std::string source_;
  NodePtr root_;
};

}  // namespace edgewave
