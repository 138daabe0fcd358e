#pragma once

#include <cmath>
#include <cstdio>
#include <fstream>
#include <istream>
#include <limits>
#include <map>
#include <ostream>
#include <sstream>
#include <string>
#include <vector>

#include "edgewave/core/error.hpp"

namespace edgewave {

/// Acceptance band of one metric.
struct Tolerance {
  enum class Kind { Below, AtLeast, Range, Within };
  Kind kind = Kind::Below;
  double a = 0.0;  ///< bound, lower end, or target
  double b = 0.0;  ///< upper end or half-width

  static Tolerance below(double bound) { return {Kind::Below, bound, 0.0}; }
  static Tolerance at_least(double bound) { return {Kind::AtLeast, bound, 0.0}; }
  static Tolerance range(double lo, double hi) { return {Kind::Range, lo, hi}; }
  static Tolerance within(double target, double half_width) { return {Kind::Within, target, half_width}; }

  bool accepts(double v) const {
    if (!std::isfinite(v)) return false;
    switch (kind) {
      case Kind::Below: return v < a;
      case Kind::AtLeast: return v >= a;
      case Kind::Range: return v >= a && v <= b;
      case Kind::Within: return std::abs(v - a) <= b;
    }
    return false;
  }

  /// Comma-free text for the CSV column.
  std::string describe() const {
    char buf[96];
    switch (kind) {
      case Kind::Below: std::snprintf(buf, sizeof buf, "<%.9g", a); break;
      case Kind::AtLeast: std::snprintf(buf, sizeof buf, ">=%.9g", a); break;
      case Kind::Range: std::snprintf(buf, sizeof buf, "[%.9g;%.9g]", a, b); break;
      case Kind::Within: std::snprintf(buf, sizeof buf, "%.9g+-%.9g", a, b); break;
    }
    return buf;
  }
};

struct ReportRow {
  std::string experiment;
  double epsilon = std::numeric_limits<double>::quiet_NaN();
  double t = std::numeric_limits<double>::quiet_NaN();
  std::string metric;
  double value = 0.0;
  std::string tolerance;
  bool pass = false;

  static ReportRow check(std::string experiment, double epsilon, double t, std::string metric, double value,
                         const Tolerance& tol) {
    return {std::move(experiment), epsilon, t, std::move(metric), value, tol.describe(), tol.accepts(value)};
  }

  /// Supporting measurement without an acceptance band.
  static ReportRow measure(std::string experiment, double epsilon, double t, std::string metric, double value) {
    return {std::move(experiment), epsilon, t, std::move(metric), value, kNoTolerance, true};
  }

  static constexpr const char* kNoTolerance = "none";
  bool is_criterion() const { return tolerance != kNoTolerance; }
};

inline constexpr const char* kReportHeader = "experiment,ε,t,metric,value,tolerance,pass";

namespace detail {
inline std::string fmt9(double v) {
  if (std::isnan(v)) return "";
  char buf[64];
  std::snprintf(buf, sizeof buf, "%.9g", v);
  return buf;
}
}  // namespace detail

inline void write_report_csv(const std::vector<ReportRow>& rows, std::ostream& os) {
  os << kReportHeader << "\n";
  for (const auto& r : rows)
    os << r.experiment << ',' << detail::fmt9(r.epsilon) << ',' << detail::fmt9(r.t) << ',' << r.metric << ','
       << detail::fmt9(r.value) << ',' << r.tolerance << ',' << (r.pass ? "PASS" : "FAIL") << "\n";
}

inline void write_report_csv(const std::vector<ReportRow>& rows, const std::string& path) {
  std::ofstream os(path);
  if (!os) fail(ErrorCode::IoError, "cannot write " + path);
  write_report_csv(rows, os);
}

inline std::vector<ReportRow> read_report_csv(std::istream& is, const std::string& source = "report") {
  std::string line;
  if (!std::getline(is, line) || line != kReportHeader)
    fail(ErrorCode::IoError, source + ": missing report header");
  std::vector<ReportRow> rows;
  auto num = [&](const std::string& s) {
    if (s.empty()) return std::numeric_limits<double>::quiet_NaN();
    try {
      return std::stod(s);
    } catch (...) {
      fail(ErrorCode::IoError, source + ": bad number '" + s + "'");
    }
  };
  while (std::getline(is, line)) {
    if (line.empty()) continue;
    std::vector<std::string> f;
    std::stringstream ss(line);
    std::string cell;
    while (std::getline(ss, cell, ',')) f.push_back(cell);
    if (line.back() == ',') f.emplace_back();
    if (f.size() != 7) fail(ErrorCode::IoError, source + ": expected 7 columns in '" + line + "'");
    if (f[6] != "PASS" && f[6] != "FAIL") fail(ErrorCode::IoError, source + ": pass column must be PASS or FAIL");
    rows.push_back({f[0], num(f[1]), num(f[2]), f[3], num(f[4]), f[5], f[6] == "PASS"});
  }
  return rows;
}

inline std::vector<ReportRow> read_report_csv(const std::string& path) {
  std::ifstream is(path);
  if (!is) fail(ErrorCode::IoError, "cannot read " + path);
  return read_report_csv(is, path);
}

struct ReportSummary {
  struct Counts {
    int pass = 0, fail = 0;
  };
  std::map<std::string, Counts> by_experiment;
  int total_pass = 0, total_fail = 0;
  bool ok() const { return total_fail == 0; }
};

inline ReportSummary summarize(const std::vector<ReportRow>& rows) {
  ReportSummary s;
  for (const auto& r : rows) {
    auto& c = s.by_experiment[r.experiment];
    if (r.pass) {
      ++c.pass;
      ++s.total_pass;
    } else {
      ++c.fail;
      ++s.total_fail;
    }
  }
  return s;
}

}  // namespace edgewave
