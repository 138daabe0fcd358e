#pragma once

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <cstring>
#include <fstream>
#include <ostream>
#include <string>
#include <vector>

#include "edgewave/core/error.hpp"
#include "edgewave/core/types.hpp"

namespace edgewave {

/// Uniform node-centered grid x_i = x_min + i·hx, y_j = y_min + j·hy.
struct Grid {
  std::size_t nx = 0, ny = 0;
  double x_min = 0.0, y_min = 0.0, hx = 1.0, hy = 1.0;

  double x(std::size_t i) const { return x_min + static_cast<double>(i) * hx; }
  double y(std::size_t j) const { return y_min + static_cast<double>(j) * hy; }
  std::size_t size() const { return nx * ny; }
  double lx() const { return static_cast<double>(nx) * hx; }
  double ly() const { return static_cast<double>(ny) * hy; }

  /// Even node counts covering `box` with spacing at most h; the periodic box
  /// is [x_min, x_min + nx·hx).
  static Grid covering(const Rect& box, double h) {
    auto count = [&](double len) {
      auto n = static_cast<std::size_t>(std::ceil(len / h));
      return n + (n % 2);
    };
    Grid g;
    g.nx = count(box.x_max - box.x_min);
    g.ny = count(box.y_max - box.y_min);
    g.x_min = box.x_min;
    g.y_min = box.y_min;
    g.hx = (box.x_max - box.x_min) / static_cast<double>(g.nx);
    g.hy = (box.y_max - box.y_min) / static_cast<double>(g.ny);
    return g;
  }

  bool operator==(const Grid& o) const = default;
};

/// Complex field with 1 (KG) or 2 (Dirac) components, stored [comp][iy][ix].
struct Field {
  Grid grid;
  int ncomp = 1;
  double time = 0.0;
  double epsilon = 0.0;
  std::vector<cplx> data;

  Field() = default;
  Field(const Grid& g, int components, double t = 0.0, double eps = 0.0)
      : grid(g), ncomp(components), time(t), epsilon(eps), data(g.size() * components) {}

  cplx& at(int c, std::size_t ix, std::size_t iy) { return data[(c * grid.ny + iy) * grid.nx + ix]; }
  const cplx& at(int c, std::size_t ix, std::size_t iy) const { return data[(c * grid.ny + iy) * grid.nx + ix]; }
  cplx* component(int c) { return data.data() + c * grid.size(); }
  const cplx* component(int c) const { return data.data() + c * grid.size(); }

  double l2_norm() const {
    double s = 0.0;
    for (const auto& v : data) s += std::norm(v);
    return std::sqrt(s * grid.hx * grid.hy);
  }

  /// max over nodes of the pointwise component norm.
  double max_abs() const {
    double m = 0.0;
    for (std::size_t i = 0; i < grid.size(); ++i) {
      double s = 0.0;
      for (int c = 0; c < ncomp; ++c) s += std::norm(data[c * grid.size() + i]);
      m = std::max(m, s);
    }
    return std::sqrt(m);
  }

  bool same_layout(const Field& o) const { return grid == o.grid && ncomp == o.ncomp; }
};

inline constexpr char kFieldMagic[8] = {'E', 'W', 'F', 'I', 'E', 'L', 'D', '\0'};
inline constexpr std::uint32_t kFieldVersion = 1;

/// Binary snapshot: magic "EWFIELD\0", u32 version, u32 ncomp, u32 nx, u32 ny,
/// f64 x_min, y_min, hx, hy, time, ε, then (re, im) f64 pairs in [comp][iy][ix]
/// order. Native little-endian.
inline void write_field(const Field& f, const std::string& path) {
  std::ofstream os(path, std::ios::binary);
  if (!os) fail(ErrorCode::IoError, "cannot open " + path + " for writing");
  auto put32 = [&](std::uint32_t v) { os.write(reinterpret_cast<const char*>(&v), 4); };
  auto putd = [&](double v) { os.write(reinterpret_cast<const char*>(&v), 8); };
  os.write(kFieldMagic, 8);
  put32(kFieldVersion);
  put32(static_cast<std::uint32_t>(f.ncomp));
  put32(static_cast<std::uint32_t>(f.grid.nx));
  put32(static_cast<std::uint32_t>(f.grid.ny));
  for (double v : {f.grid.x_min, f.grid.y_min, f.grid.hx, f.grid.hy, f.time, f.epsilon}) putd(v);
  os.write(reinterpret_cast<const char*>(f.data.data()), static_cast<std::streamsize>(f.data.size() * sizeof(cplx)));
  if (!os) fail(ErrorCode::IoError, "failed writing " + path);
}

inline Field read_field(const std::string& path) {
  std::ifstream is(path, std::ios::binary);
  if (!is) fail(ErrorCode::IoError, "cannot open " + path);
  char magic[8];
  is.read(magic, 8);
  if (!is || std::memcmp(magic, kFieldMagic, 8) != 0) fail(ErrorCode::IoError, path + " is not a field snapshot");
  auto get32 = [&] {
    std::uint32_t v = 0;
    is.read(reinterpret_cast<char*>(&v), 4);
    return v;
  };
  auto getd = [&] {
    double v = 0;
    is.read(reinterpret_cast<char*>(&v), 8);
    return v;
  };
  if (get32() != kFieldVersion) fail(ErrorCode::IoError, "unsupported field version in " + path);
  Field f;
  f.ncomp = static_cast<int>(get32());
  f.grid.nx = get32();
  f.grid.ny = get32();
  f.grid.x_min = getd();
  f.grid.y_min = getd();
  f.grid.hx = getd();
  f.grid.hy = getd();
  f.time = getd();
  f.epsilon = getd();
  if (f.ncomp < 1 || f.ncomp > 2) fail(ErrorCode::IoError, "bad component count in " + path);
  f.data.resize(f.grid.size() * f.ncomp);
  is.read(reinterpret_cast<char*>(f.data.data()), static_cast<std::streamsize>(f.data.size() * sizeof(cplx)));
  if (!is) fail(ErrorCode::IoError, "truncated field snapshot " + path);
  return f;
}

/// 1-D slice along x at row iy (axis 'x') or along y at column ix (axis 'y').
inline void write_slice_csv(const Field& f, char axis, std::size_t index, std::ostream& os) {
  os << (axis == 'x' ? "x" : "y");
  for (int c = 0; c < f.ncomp; ++c) os << ",re" << c << ",im" << c;
  os << ",abs\n";
  os.precision(9);
  const std::size_t n = axis == 'x' ? f.grid.nx : f.grid.ny;
  if (index >= (axis == 'x' ? f.grid.ny : f.grid.nx)) fail(ErrorCode::OutOfRange, "slice index outside the grid");
  for (std::size_t i = 0; i < n; ++i) {
    const std::size_t ix = axis == 'x' ? i : index, iy = axis == 'x' ? index : i;
    os << (axis == 'x' ? f.grid.x(ix) : f.grid.y(iy));
    double s = 0.0;
    for (int c = 0; c < f.ncomp; ++c) {
      const cplx v = f.at(c, ix, iy);
      os << ',' << v.real() << ',' << v.imag();
      s += std::norm(v);
    }
    os << ',' << std::sqrt(s) << '\n';
  }
}

}  // namespace edgewave
