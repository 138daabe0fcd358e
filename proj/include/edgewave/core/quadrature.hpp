#pragma once

#include <array>
#include <cmath>
#include <algorithm>
#include <cstddef>
#include <limits>
#include <type_traits>
#include <map>
#include <mutex>
#include <vector>

#include "edgewave/core/error.hpp"
#include "edgewave/core/types.hpp"

namespace edgewave::quad {

struct Rule {
  std::vector<double> nodes;
  std::vector<double> weights;

  std::size_t size() const { return nodes.size(); }
};

/// Gauss-Legendre rule on [-1, 1] via Newton iteration on P_n.
inline Rule gauss_legendre(int n) {
  Rule r;
  r.nodes.resize(n);
  r.weights.resize(n);
  const int half = (n + 1) / 2;
  for (int i = 0; i < half; ++i) {
    double z = std::cos(pi * (i + 0.75) / (n + 0.5));
    double dp = 0.0;
    for (int it = 0; it < 100; ++it) {
      double p0 = 1.0, p1 = 0.0;
      for (int j = 1; j <= n; ++j) {
        const double p2 = p1;
        p1 = p0;
        p0 = ((2.0 * j - 1.0) * z * p1 - (j - 1.0) * p2) / j;
      }
      dp = n * (z * p0 - p1) / (z * z - 1.0);
      const double dz = p0 / dp;
      z -= dz;
      if (std::abs(dz) < 1e-16) break;
    }
    double p0 = 1.0, p1 = 0.0;
    for (int j = 1; j <= n; ++j) {
      const double p2 = p1;
      p1 = p0;
      p0 = ((2.0 * j - 1.0) * z * p1 - (j - 1.0) * p2) / j;
    }
    dp = n * (z * p0 - p1) / (z * z - 1.0);
    r.nodes[i] = -z;
    r.nodes[n - 1 - i] = z;
    r.weights[i] = r.weights[n - 1 - i] = 2.0 / ((1.0 - z * z) * dp * dp);
  }
  return r;
}

/// Cached reference rule; safe to call concurrently.
inline const Rule& gauss_legendre_cached(int n) {
  static std::mutex m;
  static std::map<int, Rule> cache;
  std::lock_guard lock(m);
  auto it = cache.find(n);
  if (it == cache.end()) it = cache.emplace(n, gauss_legendre(n)).first;
  return it->second;
}

/// Composite rule: `panels` equal panels on [a, b], `order` points each.
inline Rule composite(double a, double b, int panels, int order) {
  const Rule& ref = gauss_legendre_cached(order);
  Rule r;
  r.nodes.reserve(static_cast<std::size_t>(panels) * order);
  r.weights.reserve(r.nodes.capacity());
  const double h = (b - a) / panels;
  for (int p = 0; p < panels; ++p) {
    const double mid = a + (p + 0.5) * h;
    for (int i = 0; i < order; ++i) {
      r.nodes.push_back(mid + 0.5 * h * ref.nodes[i]);
      r.weights.push_back(0.5 * h * ref.weights[i]);
    }
  }
  return r;
}

template <class Fn>
auto integrate(const Rule& rule, Fn&& f) {
  using T = decltype(f(0.0));
  T sum{};
  for (std::size_t i = 0; i < rule.size(); ++i) sum += rule.weights[i] * f(rule.nodes[i]);
  return sum;
}

template <class Fn>
auto gauss_legendre_integrate(double a, double b, int order, Fn&& f) {
  const Rule& ref = gauss_legendre_cached(order);
  using T = decltype(f(0.0));
  T sum{};
  const double mid = 0.5 * (a + b), half = 0.5 * (b - a);
  for (int i = 0; i < order; ++i) sum += ref.weights[i] * f(mid + half * ref.nodes[i]);
  return half * sum;
}

namespace detail {

inline constexpr std::array<double, 8> kXgk = {
    0.991455371120812639206854697526329, 0.949107912342758524526189684047851,
    0.864864423359769072789712788640926, 0.741531185599394439863864773280788,
    0.586087235467691130294144845693013, 0.405845151377397166906606412076961,
    0.207784955007898467600689403773245, 0.000000000000000000000000000000000};
inline constexpr std::array<double, 8> kWgk = {
    0.022935322010529224963732008058970, 0.063092092629978553290700663189204,
    0.104790010322250183839876322541518, 0.140653259715525918745189590510238,
    0.169004726639267902826583426598550, 0.190350578064785409913256402421014,
    0.204432940075298892414161999234649, 0.209482141084727828012999174891714};
inline constexpr std::array<double, 4> kWg = {
    0.129484966168869693270611432679082, 0.279705391489276667901467771423780,
    0.381830050505118944950369775488975, 0.417959183673469387755102040816327};

template <class Fn>
auto kronrod15(Fn& f, double a, double b, double& err, double& resabs) {
  using T = decltype(f(0.0));
  const double c = 0.5 * (a + b), h = 0.5 * (b - a);
  const T fc = f(c);
  T resk = fc * kWgk[7];
  T resg = fc * kWg[3];
  resabs = kWgk[7] * std::abs(fc);
  for (int j = 0; j < 7; ++j) {
    const double dx = h * kXgk[j];
    const T f1 = f(c - dx), f2 = f(c + dx);
    resk += kWgk[j] * (f1 + f2);
    resabs += kWgk[j] * (std::abs(f1) + std::abs(f2));
    if (j % 2 == 1) resg += kWg[j / 2] * (f1 + f2);
  }
  err = std::abs(h * (resk - resg));
  resabs *= std::abs(h);
  return h * resk;
}

}  // namespace detail

/// Globally adaptive Gauss-Kronrod (7/15) quadrature: the interval with the
/// largest error estimate is bisected until the summed estimate drops below
/// `tol` or below the roundoff level of ∫|f|. Works for real and complex integrands.
template <class Fn>
auto adaptive(Fn&& f, double a, double b, double tol = 1e-12, int max_intervals = 200000)
    -> std::decay_t<decltype(f(0.0))> {
  using T = std::decay_t<decltype(f(0.0))>;
  if (b < a) return T(-adaptive(f, b, a, tol, max_intervals));
  struct Piece {
    double a, b, err, resabs;
    T value;
    bool operator<(const Piece& o) const { return err < o.err; }
  };
  auto make = [&](double lo, double hi) {
    Piece p{lo, hi, 0.0, 0.0, T{}};
    p.value = detail::kronrod15(f, lo, hi, p.err, p.resabs);
    return p;
  };
  std::vector<Piece> heap{make(a, b)};
  T total = heap.front().value;
  double err = heap.front().err, resabs = heap.front().resabs;
  while (static_cast<int>(heap.size()) < max_intervals) {
    if (err <= std::max(tol, 64.0 * std::numeric_limits<double>::epsilon() * resabs)) break;
    std::pop_heap(heap.begin(), heap.end());
    const Piece worst = heap.back();
    heap.pop_back();
    const double m = 0.5 * (worst.a + worst.b);
    if (!(m > worst.a && m < worst.b)) {
      heap.push_back(worst);
      break;
    }
    const Piece l = make(worst.a, m), r = make(m, worst.b);
    total += l.value + r.value - worst.value;
    err += l.err + r.err - worst.err;
    resabs += l.resabs + r.resabs - worst.resabs;
    heap.push_back(l);
    std::push_heap(heap.begin(), heap.end());
    heap.push_back(r);
    std::push_heap(heap.begin(), heap.end());
  }
  // resum to shed the drift of the running updates
  T sum{};
  for (const auto& p : heap) sum += p.value;
  return sum;
}

}  // namespace edgewave::quad
