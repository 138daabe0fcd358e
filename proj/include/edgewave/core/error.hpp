#pragma once

#include <stdexcept>
#include <string>
#include <string_view>
#include <utility>
#include <vector>

namespace edgewave {

enum class ErrorCode {
  NoConvergence,
  DegenerateGradient,
  CurveLeavesDomain,
  OutsideTube,
  OutOfRange,
  InvalidBranch,
  ZeroEnergy,
  TurningPointAtLaunch,
  EmptySupport,
  MultipleRoots,
  DegenerateHessian,
  UnderResolvedQuadrature,
  OutsideValidity,
  NoStationaryPoint,
  UnstableStep,
  GridMismatch,
  ConfigError,
  ResourceLimit,
  IoError,
};

inline std::string_view to_string(ErrorCode code) {
  switch (code) {
    case ErrorCode::NoConvergence: return "NoConvergence";
    case ErrorCode::DegenerateGradient: return "DegenerateGradient";
    case ErrorCode::CurveLeavesDomain: return "CurveLeavesDomain";
    case ErrorCode::OutsideTube: return "OutsideTube";
    case ErrorCode::OutOfRange: return "OutOfRange";
    case ErrorCode::InvalidBranch: return "InvalidBranch";
    case ErrorCode::ZeroEnergy: return "ZeroEnergy";
    case ErrorCode::TurningPointAtLaunch: return "TurningPointAtLaunch";
    case ErrorCode::EmptySupport: return "EmptySupport";
    case ErrorCode::MultipleRoots: return "MultipleRoots";
    case ErrorCode::DegenerateHessian: return "DegenerateHessian";
    case ErrorCode::UnderResolvedQuadrature: return "UnderResolvedQuadrature";
    case ErrorCode::OutsideValidity: return "OutsideValidity";
    case ErrorCode::NoStationaryPoint: return "NoStationaryPoint";
    case ErrorCode::UnstableStep: return "UnstableStep";
    case ErrorCode::GridMismatch: return "GridMismatch";
    case ErrorCode::ConfigError: return "ConfigError";
    case ErrorCode::ResourceLimit: return "ResourceLimit";
    case ErrorCode::IoError: return "IoError";
  }
  return "Unknown";
}

/// Library-wide exception. `values` carries an optional numeric payload,
/// e.g. every root found when a stationary-point search reports MultipleRoots.
class Error : public std::runtime_error {
 public:
  Error(ErrorCode code, const std::string& what, std::vector<double> values = {})
      : std::runtime_error(std::string(to_string(code)) + ": " + what),
        code_(code),
        values_(std::move(values)) {}

  ErrorCode code() const noexcept { return code_; }
  const std::vector<double>& values() const noexcept { return values_; }

 private:
  ErrorCode code_;
  std::vector<double> values_;
};

[[noreturn]] inline void fail(ErrorCode code, const std::string& what,
                              std::vector<double> values = {}) {
  throw Error(code, what, std::move(values));
}

}  // namespace edgewave
