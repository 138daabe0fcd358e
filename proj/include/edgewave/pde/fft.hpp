#pragma once

#include <fftw3.h>

#include <complex>
#include <memory>
#include <mutex>
#include <vector>

#include "edgewave/core/error.hpp"
#include "edgewave/core/types.hpp"
#include "edgewave/wavepacket/field.hpp"

namespace edgewave {

namespace detail {
/// FFTW planning is not thread-safe; execution is.
inline std::mutex& fftw_plan_mutex() {
  static std::mutex m;
  return m;
}
}  // namespace detail

/// In-place 2-D complex FFT of one nx × ny component (row-major [iy][ix]).
/// Unnormalized in both directions. Plans use FFTW_ESTIMATE so results do not
/// depend on timing.
class FFT2 {
 public:
  FFT2(std::size_t nx, std::size_t ny) : nx_(nx), ny_(ny), buf_(nx * ny) {
    auto* p = reinterpret_cast<fftw_complex*>(buf_.data());
    std::lock_guard lock(detail::fftw_plan_mutex());
    fwd_ = fftw_plan_dft_2d(static_cast<int>(ny), static_cast<int>(nx), p, p, FFTW_FORWARD, FFTW_ESTIMATE);
    bwd_ = fftw_plan_dft_2d(static_cast<int>(ny), static_cast<int>(nx), p, p, FFTW_BACKWARD, FFTW_ESTIMATE);
    if (!fwd_ || !bwd_) fail(ErrorCode::ResourceLimit, "FFTW planning failed");
  }
  FFT2(const FFT2&) = delete;
  FFT2& operator=(const FFT2&) = delete;
  ~FFT2() {
    std::lock_guard lock(detail::fftw_plan_mutex());
    fftw_destroy_plan(fwd_);
    fftw_destroy_plan(bwd_);
  }

  void forward(cplx* data) { run(fwd_, data); }
  void backward(cplx* data) { run(bwd_, data); }
  std::size_t nx() const { return nx_; }
  std::size_t ny() const { return ny_; }

 private:
  void run(fftw_plan plan, cplx* data) {
    auto* d = reinterpret_cast<fftw_complex*>(data);
    fftw_execute_dft(plan, d, d);
  }
  std::size_t nx_, ny_;
  // planning buffer; FFTW_ESTIMATE does not touch it, and new-array execution
  // requires the same alignment, which std::complex<double> vectors provide
  std::vector<cplx> buf_;
  fftw_plan fwd_ = nullptr, bwd_ = nullptr;
};

/// Angular wavenumbers 2π·j/L of an n-point periodic grid in FFT order.
inline std::vector<double> wavenumbers(std::size_t n, double h) {
  std::vector<double> k(n);
  const double L = static_cast<double>(n) * h;
  for (std::size_t j = 0; j < n; ++j) {
    const auto jj = static_cast<long>(j);
    const long s = jj <= static_cast<long>(n / 2) ? jj : jj - static_cast<long>(n);
    k[j] = 2.0 * pi * static_cast<double>(s) / L;
  }
  // the Nyquist mode has no sign; zero it for odd derivatives
  if (n % 2 == 0) k[n / 2] = 0.0;
  return k;
}

/// |k|² including the Nyquist mode, for even derivatives.
inline std::vector<double> wavenumbers_squared(std::size_t n, double h) {
  std::vector<double> k2(n);
  const double L = static_cast<double>(n) * h;
  for (std::size_t j = 0; j < n; ++j) {
    const auto jj = static_cast<long>(j);
    const long s = jj <= static_cast<long>(n / 2) ? jj : jj - static_cast<long>(n);
    const double k = 2.0 * pi * static_cast<double>(s) / L;
    k2[j] = k * k;
  }
  return k2;
}

/// Spectral derivatives of one component: ∂x, ∂y and Δ on the periodic grid.
class SpectralOps {
 public:
  explicit SpectralOps(const Grid& g)
      : grid_(g), fft_(g.nx, g.ny), kx_(wavenumbers(g.nx, g.hx)), ky_(wavenumbers(g.ny, g.hy)),
        kx2_(wavenumbers_squared(g.nx, g.hx)), ky2_(wavenumbers_squared(g.ny, g.hy)), work_(g.size()) {}

  const Grid& grid() const { return grid_; }
  FFT2& fft() { return fft_; }
  const std::vector<double>& kx() const { return kx_; }
  const std::vector<double>& ky() const { return ky_; }
  const std::vector<double>& kx2() const { return kx2_; }
  const std::vector<double>& ky2() const { return ky2_; }

  /// out = ∂x in, ∂y in.
  void gradient(const cplx* in, cplx* dx, cplx* dy) {
    const std::size_t n = grid_.size();
    std::copy(in, in + n, work_.begin());
    fft_.forward(work_.data());
    const double s = 1.0 / static_cast<double>(n);
    for (std::size_t iy = 0; iy < grid_.ny; ++iy)
      for (std::size_t ix = 0; ix < grid_.nx; ++ix) {
        const std::size_t i = iy * grid_.nx + ix;
        dx[i] = cplx(0.0, kx_[ix] * s) * work_[i];
        dy[i] = cplx(0.0, ky_[iy] * s) * work_[i];
      }
    fft_.backward(dx);
    fft_.backward(dy);
  }

  /// out = Δ in.
  void laplacian(const cplx* in, cplx* out) {
    const std::size_t n = grid_.size();
    std::copy(in, in + n, out);
    fft_.forward(out);
    const double s = 1.0 / static_cast<double>(n);
    for (std::size_t iy = 0; iy < grid_.ny; ++iy)
      for (std::size_t ix = 0; ix < grid_.nx; ++ix) out[iy * grid_.nx + ix] *= -(kx2_[ix] + ky2_[iy]) * s;
    fft_.backward(out);
  }

 private:
  Grid grid_;
  FFT2 fft_;
  std::vector<double> kx_, ky_, kx2_, ky2_;
  std::vector<cplx> work_;
};

}  // namespace edgewave
