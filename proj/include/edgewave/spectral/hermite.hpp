#pragma once

#include <cmath>
#include <vector>

#include "edgewave/core/error.hpp"
#include "edgewave/core/types.hpp"

namespace edgewave {

/// φ_0 … φ_{m_max} at z, the L²-normalized oscillator eigenfunctions, by the
/// recurrence φ_{n+1} = √(2/(n+1)) z φ_n − √(n/(n+1)) φ_{n−1}.
inline std::vector<double> hermite_all(int m_max, double z) {
  if (m_max < 0) fail(ErrorCode::OutOfRange, "hermite index must be nonnegative");
  std::vector<double> phi(static_cast<std::size_t>(m_max) + 1);
  phi[0] = std::pow(pi, -0.25) * std::exp(-0.5 * z * z);
  if (m_max >= 1) phi[1] = std::sqrt(2.0) * z * phi[0];
  for (int n = 1; n < m_max; ++n)
    phi[n + 1] = std::sqrt(2.0 / (n + 1)) * z * phi[n] - std::sqrt(double(n) / (n + 1)) * phi[n - 1];
  return phi;
}

inline double hermite(int m, double z) { return hermite_all(m, z).back(); }

/// φ_m'(z) = √(m/2) φ_{m−1} − √((m+1)/2) φ_{m+1}.
inline double hermite_derivative(int m, double z) {
  const auto phi = hermite_all(m + 1, z);
  const double lower = m > 0 ? std::sqrt(m / 2.0) * phi[m - 1] : 0.0;
  return lower - std::sqrt((m + 1) / 2.0) * phi[m + 1];
}

}  // namespace edgewave
