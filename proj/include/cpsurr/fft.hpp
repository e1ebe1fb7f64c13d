#pragma once

// Thin RAII wrapper over FFTW's real-to-complex / complex-to-real plans for
// one transform length. Planning goes through a process-wide mutex because
// the FFTW planner is not reentrant; execution is.

#include <fftw3.h>

#include <complex>
#include <cstring>
#include <memory>
#include <mutex>
#include <span>
#include <vector>

#include "cpsurr/signal.hpp"

namespace cpsurr {

namespace detail {

inline std::mutex& fftw_planner_mutex() {
  static std::mutex m;
  return m;
}

struct FftwFree {
  void operator()(void* p) const noexcept { fftw_free(p); }
};

struct FftwPlanDestroy {
  void operator()(fftw_plan p) const noexcept {
    std::lock_guard lock(fftw_planner_mutex());
    fftw_destroy_plan(p);
  }
};

using FftwPlan = std::unique_ptr<std::remove_pointer_t<fftw_plan>, FftwPlanDestroy>;

}  // namespace detail

class RealFft {
 public:
  explicit RealFft(std::size_t n) : n_(n), bins_(n / 2 + 1) {
    if (n < 1) throw Error(ErrorKind::invalid_argument, "FFT length must be >= 1");
    real_.reset(static_cast<double*>(fftw_malloc(sizeof(double) * n_)));
    spec_.reset(static_cast<fftw_complex*>(fftw_malloc(sizeof(fftw_complex) * bins_)));
    std::lock_guard lock(detail::fftw_planner_mutex());
    const int len = static_cast<int>(n_);
    forward_.reset(fftw_plan_dft_r2c_1d(len, real_.get(), spec_.get(), FFTW_ESTIMATE));
    inverse_.reset(fftw_plan_dft_c2r_1d(len, spec_.get(), real_.get(), FFTW_ESTIMATE | FFTW_DESTROY_INPUT));
  }

  std::size_t size() const noexcept { return n_; }
  /// Number of non-redundant bins, n/2 + 1.
  std::size_t bins() const noexcept { return bins_; }

  /// Unnormalised forward transform, bins 0..n/2.
  void forward(std::span<const double> in, std::span<std::complex<double>> out) {
    std::memcpy(real_.get(), in.data(), sizeof(double) * n_);
    fftw_execute(forward_.get());
    std::memcpy(static_cast<void*>(out.data()), spec_.get(), sizeof(fftw_complex) * bins_);
  }

  std::vector<std::complex<double>> forward(std::span<const double> in) {
    std::vector<std::complex<double>> out(bins_);
    forward(in, out);
    return out;
  }

  /// Inverse of a Hermitian half spectrum, normalised by 1/n. Imaginary
  /// parts of the DC and Nyquist bins are ignored (real part of the full
  /// inverse transform).
  void inverse(std::span<const std::complex<double>> in, std::span<double> out) {
    std::memcpy(static_cast<void*>(spec_.get()), in.data(), sizeof(fftw_complex) * bins_);
    fftw_execute(inverse_.get());
    const double scale = 1.0 / static_cast<double>(n_);
    for (std::size_t i = 0; i < n_; ++i) out[i] = real_.get()[i] * scale;
  }

 private:
  std::size_t n_;
  std::size_t bins_;
  std::unique_ptr<double, detail::FftwFree> real_;
  std::unique_ptr<fftw_complex, detail::FftwFree> spec_;
  detail::FftwPlan forward_;
  detail::FftwPlan inverse_;
};

/// Weight of half-spectrum bin k in a sum over the full two-sided spectrum.
inline double two_sided_weight(std::size_t k, std::size_t n) noexcept {
  return (k == 0 || (n % 2 == 0 && k == n / 2)) ? 1.0 : 2.0;
}

/// |FFT(x)| over the full two-sided spectrum (length n).
inline std::vector<double> amplitude_spectrum(std::span<const double> x) {
  RealFft fft(x.size());
  const auto half = fft.forward(x);
  std::vector<double> full(x.size());
  for (std::size_t k = 0; k < half.size(); ++k) {
    full[k] = std::abs(half[k]);
    if (k != 0) full[x.size() - k] = full[k];
  }
  return full;
}

}  // namespace cpsurr
