#pragma once

#include <toml.hpp>

#include <algorithm>
#include <cstdint>
#include <filesystem>
#include <fstream>
#include <map>
#include <optional>
#include <sstream>
#include <string>
#include <vector>

#include "edgewave/core/error.hpp"
#include "edgewave/core/types.hpp"
#include "edgewave/geometry/domain_wall.hpp"
#include "edgewave/spectral/branches.hpp"
#include "edgewave/wavepacket/envelope.hpp"

namespace edgewave {

inline constexpr int kSchemaVersion = 1;

struct WallConfig {
  std::string kind = "flat";  ///< flat | circle | analytic
  double radius = 1.0;
  std::string expression;
  Rect bounds{-4, 4, -2, 2};
  Point seed{0, 0};
  double step = 0.01;
  double max_length = 20.0;

  DomainWall build() const {
    if (kind == "flat") return DomainWall::flat(bounds);
    if (kind == "circle") return DomainWall::circle(radius, bounds);
    if (kind == "analytic") {
      try {
        return DomainWall::analytic(expression, bounds);
      } catch (const Error& e) {
        fail(ErrorCode::ConfigError, "wall.expression: " + std::string(e.what()));
      }
    }
    fail(ErrorCode::ConfigError, "wall.kind must be flat, circle or analytic, got '" + kind + "'");
  }
  bool operator==(const WallConfig&) const = default;
};

struct EnvelopeConfig {
  std::string kind = "gaussian";  ///< gaussian | bump
  double center = 0.0;
  double width = 1.0;  ///< σ of the Gaussian, or the longitudinal width for m = 0
  double lo = 0.0, hi = 0.0;  ///< bump support

  Envelope build() const {
    if (kind == "gaussian") return Envelope::gaussian(center, width);
    if (kind == "bump") return Envelope::bump(lo, hi);
    fail(ErrorCode::ConfigError, "envelope.kind must be gaussian or bump, got '" + kind + "'");
  }
  bool operator==(const EnvelopeConfig&) const = default;
};

struct GridConfig {
  double points_per_sqrt_eps = 8.0;
  /// Box margin around the region of interest, in units of √ε.
  double padding = 12.0;
  bool operator==(const GridConfig&) const = default;
};

struct SolverSettings {
  /// Time step as a multiple of ε; 0 picks the experiment default.
  double dt_over_eps = 0.0;
  bool fourth_order = true;
  bool operator==(const SolverSettings&) const = default;
};

struct ExperimentConfig {
  int schema_version = kSchemaVersion;
  std::string experiment = "custom";
  std::string model = "dirac";
  WallConfig wall;
  std::vector<double> epsilons{0.01};
  int branch_m = 0;
  int branch_sign = -1;
  EnvelopeConfig envelope;
  double x0 = 0.0;
  GridConfig grid;
  SolverSettings solver;
  std::vector<double> times{1.0};
  std::string output_dir = "out";
  std::uint64_t seed = 1;
  /// Experiment-specific knobs.
  std::map<std::string, double> params;

  Model model_kind() const {
    if (model == "dirac") return Model::Dirac;
    if (model == "klein_gordon") return Model::KleinGordon;
    fail(ErrorCode::ConfigError, "model must be dirac or klein_gordon, got '" + model + "'");
  }
  BranchSpec branch() const { return BranchSpec::create(model_kind(), branch_m, branch_sign); }

  double param(const std::string& key, double fallback) const {
    auto it = params.find(key);
    return it == params.end() ? fallback : it->second;
  }

  static bool known_experiment(const std::string& id) {
    static const char* ids[] = {"E1", "E2", "E3", "E4", "E5", "E6", "props", "custom"};
    return std::any_of(std::begin(ids), std::end(ids), [&](const char* s) { return id == s; });
  }

  /// Checks every field; the message names the offending key.
  void validate() const {
    if (schema_version != kSchemaVersion)
      fail(ErrorCode::ConfigError, "schema_version " + std::to_string(schema_version) + " is not supported");
    if (!known_experiment(experiment)) fail(ErrorCode::ConfigError, "experiment: unknown id '" + experiment + "'");
    model_kind();
    if (epsilons.empty()) fail(ErrorCode::ConfigError, "epsilons must not be empty");
    for (double e : epsilons)
      if (!(e > 0.0 && e <= 0.25)) fail(ErrorCode::ConfigError, "epsilons: each value must lie in (0, 0.25]");
    if (!std::is_sorted(epsilons.rbegin(), epsilons.rend()) ||
        std::adjacent_find(epsilons.begin(), epsilons.end()) != epsilons.end())
      fail(ErrorCode::ConfigError, "epsilons must be sorted in strictly descending order");
    try {
      branch();
    } catch (const Error& e) {
      fail(ErrorCode::ConfigError, "branch: " + std::string(e.what()));
    }
    wall.build();
    if (!(wall.step > 0.0) || !(wall.max_length > wall.step))
      fail(ErrorCode::ConfigError, "wall.step and wall.max_length must be positive with max_length > step");
    if (!(wall.bounds.x_max > wall.bounds.x_min) || !(wall.bounds.y_max > wall.bounds.y_min))
      fail(ErrorCode::ConfigError, "wall.bounds must be [x_min, x_max, y_min, y_max] with positive extent");
    try {
      envelope.build();
    } catch (const Error& e) {
      fail(ErrorCode::ConfigError, "envelope: " + std::string(e.what()));
    }
    if (!(grid.points_per_sqrt_eps >= 8.0)) fail(ErrorCode::ConfigError, "grid.points_per_sqrt_eps must be >= 8");
    if (!(grid.padding > 0.0)) fail(ErrorCode::ConfigError, "grid.padding must be positive");
    if (solver.dt_over_eps < 0.0) fail(ErrorCode::ConfigError, "solver.dt_over_eps must be nonnegative");
    if (times.empty()) fail(ErrorCode::ConfigError, "times must not be empty");
    if (output_dir.empty()) fail(ErrorCode::ConfigError, "output_dir must not be empty");
  }

  /// Creates the output directory and checks that it accepts files.
  void prepare_output() const {
    std::error_code ec;
    std::filesystem::create_directories(output_dir, ec);
    const auto probe = std::filesystem::path(output_dir) / ".write_probe";
    std::ofstream os(probe);
    if (ec || !os) fail(ErrorCode::ConfigError, "output_dir '" + output_dir + "' is not writable");
    os.close();
    std::filesystem::remove(probe, ec);
  }

  bool operator==(const ExperimentConfig&) const = default;
};

namespace detail {

inline std::string join_key(const std::string& prefix, const std::string& key) {
  return prefix.empty() ? key : prefix + "." + key;
}

inline double get_number(const toml::table& t, const std::string& prefix, const std::string& key, double fallback) {
  const auto* node = t.get(key);
  if (!node) return fallback;
  if (auto v = node->value<double>()) return *v;
  fail(ErrorCode::ConfigError, join_key(prefix, key) + " must be a number");
}

inline std::string get_string(const toml::table& t, const std::string& prefix, const std::string& key,
                              const std::string& fallback) {
  const auto* node = t.get(key);
  if (!node) return fallback;
  if (auto v = node->value<std::string>()) return *v;
  fail(ErrorCode::ConfigError, join_key(prefix, key) + " must be a string");
}

inline bool get_bool(const toml::table& t, const std::string& prefix, const std::string& key, bool fallback) {
  const auto* node = t.get(key);
  if (!node) return fallback;
  if (auto v = node->value<bool>()) return *v;
  fail(ErrorCode::ConfigError, join_key(prefix, key) + " must be a boolean");
}

inline std::int64_t get_int(const toml::table& t, const std::string& prefix, const std::string& key,
                            std::int64_t fallback) {
  const auto* node = t.get(key);
  if (!node) return fallback;
  if (auto v = node->value_exact<std::int64_t>()) return *v;
  fail(ErrorCode::ConfigError, join_key(prefix, key) + " must be an integer");
}

inline std::vector<double> get_numbers(const toml::table& t, const std::string& prefix, const std::string& key,
                                       std::vector<double> fallback) {
  const auto* node = t.get(key);
  if (!node) return fallback;
  const auto* arr = node->as_array();
  if (!arr) fail(ErrorCode::ConfigError, join_key(prefix, key) + " must be an array of numbers");
  std::vector<double> out;
  for (const auto& el : *arr) {
    auto v = el.value<double>();
    if (!v) fail(ErrorCode::ConfigError, join_key(prefix, key) + " must be an array of numbers");
    out.push_back(*v);
  }
  return out;
}

inline const toml::table* get_table(const toml::table& t, const std::string& key) {
  const auto* node = t.get(key);
  if (!node) return nullptr;
  if (const auto* tab = node->as_table()) return tab;
  fail(ErrorCode::ConfigError, key + " must be a table");
}

inline toml::array to_array(const std::vector<double>& v) {
  toml::array a;
  for (double x : v) a.push_back(x);
  return a;
}

}  // namespace detail

inline ExperimentConfig parse_config(const toml::table& root) {
  using namespace detail;
  ExperimentConfig c;
  c.schema_version = static_cast<int>(get_int(root, "", "schema_version", -1));
  if (c.schema_version == -1) fail(ErrorCode::ConfigError, "schema_version is required");
  c.experiment = get_string(root, "", "experiment", c.experiment);
  c.model = get_string(root, "", "model", c.model);
  c.epsilons = get_numbers(root, "", "epsilons", c.epsilons);
  c.x0 = get_number(root, "", "x0", c.x0);
  c.times = get_numbers(root, "", "times", c.times);
  c.output_dir = get_string(root, "", "output_dir", c.output_dir);
  const auto seed = get_int(root, "", "seed", static_cast<std::int64_t>(c.seed));
  if (seed < 0) fail(ErrorCode::ConfigError, "seed must be nonnegative");
  c.seed = static_cast<std::uint64_t>(seed);

  if (const auto* w = get_table(root, "wall")) {
    c.wall.kind = get_string(*w, "wall", "kind", c.wall.kind);
    c.wall.radius = get_number(*w, "wall", "radius", c.wall.radius);
    c.wall.expression = get_string(*w, "wall", "expression", c.wall.expression);
    const auto b = get_numbers(*w, "wall", "bounds",
                               {c.wall.bounds.x_min, c.wall.bounds.x_max, c.wall.bounds.y_min, c.wall.bounds.y_max});
    if (b.size() != 4) fail(ErrorCode::ConfigError, "wall.bounds must have four entries");
    c.wall.bounds = {b[0], b[1], b[2], b[3]};
    const auto s = get_numbers(*w, "wall", "seed", {c.wall.seed.x, c.wall.seed.y});
    if (s.size() != 2) fail(ErrorCode::ConfigError, "wall.seed must have two entries");
    c.wall.seed = {s[0], s[1]};
    c.wall.step = get_number(*w, "wall", "step", c.wall.step);
    c.wall.max_length = get_number(*w, "wall", "max_length", c.wall.max_length);
  }
  if (const auto* b = get_table(root, "branch")) {
    c.branch_m = static_cast<int>(get_int(*b, "branch", "m", c.branch_m));
    c.branch_sign = static_cast<int>(get_int(*b, "branch", "sign", c.branch_sign));
  }
  if (const auto* e = get_table(root, "envelope")) {
    c.envelope.kind = get_string(*e, "envelope", "kind", c.envelope.kind);
    c.envelope.center = get_number(*e, "envelope", "center", c.envelope.center);
    c.envelope.width = get_number(*e, "envelope", "width", c.envelope.width);
    c.envelope.lo = get_number(*e, "envelope", "lo", c.envelope.lo);
    c.envelope.hi = get_number(*e, "envelope", "hi", c.envelope.hi);
  }
  if (const auto* g = get_table(root, "grid")) {
    c.grid.points_per_sqrt_eps = get_number(*g, "grid", "points_per_sqrt_eps", c.grid.points_per_sqrt_eps);
    c.grid.padding = get_number(*g, "grid", "padding", c.grid.padding);
  }
  if (const auto* s = get_table(root, "solver")) {
    c.solver.dt_over_eps = get_number(*s, "solver", "dt_over_eps", c.solver.dt_over_eps);
    c.solver.fourth_order = get_bool(*s, "solver", "fourth_order", c.solver.fourth_order);
  }
  if (const auto* p = get_table(root, "params")) {
    for (const auto& [k, v] : *p) {
      auto d = v.value<double>();
      if (!d) fail(ErrorCode::ConfigError, "params." + std::string(k.str()) + " must be a number");
      c.params[std::string(k.str())] = *d;
    }
  }
  c.validate();
  return c;
}

inline ExperimentConfig parse_config_string(const std::string& text, const std::string& source = "config") {
  try {
    return parse_config(toml::parse(text, source));
  } catch (const toml::parse_error& e) {
    fail(ErrorCode::ConfigError, source + ": " + std::string(e.description()));
  }
}

inline ExperimentConfig load_config(const std::string& path) {
  std::ifstream is(path);
  if (!is) fail(ErrorCode::ConfigError, "cannot read config file " + path);
  std::stringstream ss;
  ss << is.rdbuf();
  return parse_config_string(ss.str(), path);
}

inline toml::table to_toml(const ExperimentConfig& c) {
  using detail::to_array;
  toml::table wall{{"kind", c.wall.kind},
                   {"radius", c.wall.radius},
                   {"expression", c.wall.expression},
                   {"bounds", to_array({c.wall.bounds.x_min, c.wall.bounds.x_max, c.wall.bounds.y_min,
                                        c.wall.bounds.y_max})},
                   {"seed", to_array({c.wall.seed.x, c.wall.seed.y})},
                   {"step", c.wall.step},
                   {"max_length", c.wall.max_length}};
  toml::table env{{"kind", c.envelope.kind},
                  {"center", c.envelope.center},
                  {"width", c.envelope.width},
                  {"lo", c.envelope.lo},
                  {"hi", c.envelope.hi}};
  toml::table params;
  for (const auto& [k, v] : c.params) params.insert(k, v);
  return toml::table{
      {"schema_version", c.schema_version},
      {"experiment", c.experiment},
      {"model", c.model},
      {"epsilons", to_array(c.epsilons)},
      {"x0", c.x0},
      {"times", to_array(c.times)},
      {"output_dir", c.output_dir},
      {"seed", static_cast<std::int64_t>(c.seed)},
      {"wall", wall},
      {"branch", toml::table{{"m", c.branch_m}, {"sign", c.branch_sign}}},
      {"envelope", env},
      {"grid", toml::table{{"points_per_sqrt_eps", c.grid.points_per_sqrt_eps}, {"padding", c.grid.padding}}},
      {"solver", toml::table{{"dt_over_eps", c.solver.dt_over_eps}, {"fourth_order", c.solver.fourth_order}}},
      {"params", params},
  };
}

inline std::string serialize_config(const ExperimentConfig& c) {
  std::ostringstream os;
  os << to_toml(c) << "\n";
  return os.str();
}

}  // namespace edgewave
