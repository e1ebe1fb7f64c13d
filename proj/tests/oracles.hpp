#pragma once

// Independent reference computations used only by the tests. Nothing here
// calls into the library's numerical code paths.

#include <algorithm>
#include <cmath>
#include <complex>
#include <numbers>
#include <numeric>
#include <span>
#include <utility>
#include <vector>

namespace oracle {

using cd = std::complex<double>;

/// O(n^2) DFT, any length.
inline std::vector<cd> naive_dft(std::span<const double> x) {
  const std::size_t n = x.size();
  std::vector<cd> out(n);
  for (std::size_t k = 0; k < n; ++k) {
    cd acc{};
    for (std::size_t t = 0; t < n; ++t) {
      const double ang = -2.0 * std::numbers::pi * static_cast<double>((k * t) % n) / static_cast<double>(n);
      acc += x[t] * cd(std::cos(ang), std::sin(ang));
    }
    out[k] = acc;
  }
  return out;
}

/// In-place iterative radix-2 FFT; n must be a power of two. The inverse is
/// normalised by 1/n.
inline void radix2(std::vector<cd>& a, bool inverse) {
  const std::size_t n = a.size();
  for (std::size_t i = 1, j = 0; i < n; ++i) {
    std::size_t bit = n >> 1;
    for (; j & bit; bit >>= 1) j ^= bit;
    j ^= bit;
    if (i < j) std::swap(a[i], a[j]);
  }
  for (std::size_t len = 2; len <= n; len <<= 1) {
    const double ang = 2.0 * std::numbers::pi / static_cast<double>(len) * (inverse ? 1.0 : -1.0);
    for (std::size_t i = 0; i < n; i += len) {
      for (std::size_t j = 0; j < len / 2; ++j) {
        const cd w = std::polar(1.0, ang * static_cast<double>(j));
        const cd u = a[i + j];
        const cd v = a[i + j + len / 2] * w;
        a[i + j] = u + v;
        a[i + j + len / 2] = u - v;
      }
    }
  }
  if (inverse) {
    for (auto& v : a) v /= static_cast<double>(n);
  }
}

inline std::vector<double> amplitude(std::span<const double> x) {
  std::vector<cd> a(x.begin(), x.end());
  radix2(a, false);
  std::vector<double> m(a.size());
  for (std::size_t i = 0; i < a.size(); ++i) m[i] = std::abs(a[i]);
  return m;
}

inline double rel_l2(std::span<const double> a, std::span<const double> ref) {
  double num = 0.0;
  double den = 0.0;
  for (std::size_t i = 0; i < a.size(); ++i) {
    num += (a[i] - ref[i]) * (a[i] - ref[i]);
    den += ref[i] * ref[i];
  }
  return std::sqrt(num / den);
}

/// Direct summation of the normalised exponentially weighted average.
inline std::vector<double> ewma(std::span<const double> x, double lambda) {
  std::vector<double> out;
  for (std::size_t n = 1; n <= x.size(); ++n) {
    double num = 0.0;
    double w = 0.0;
    for (std::size_t l = 1; l <= n; ++l) {
      const double weight = std::pow(lambda, static_cast<double>(n - l));
      num += weight * x[l - 1];
      w += weight;
    }
    out.push_back(num / w);
  }
  return out;
}

/// y_n = e_n - e_{n-kappa} for n = kappa+1 .. N (1-based).
inline std::vector<double> lagged(std::span<const double> e, std::size_t kappa) {
  std::vector<double> out;
  for (std::size_t n = kappa + 1; n <= e.size(); ++n) out.push_back(e[n - 1] - e[n - 1 - kappa]);
  return out;
}

/// |H(f)| of a digital Butterworth band-pass of prototype order `order`
/// designed by the bilinear transform with pre-warped edges.
inline double butterworth_bandpass_gain(double f, double lo, double hi, double fs, int order) {
  auto warp = [fs](double hz) { return 2.0 * fs * std::tan(std::numbers::pi * hz / fs); };
  const double w = warp(f);
  const double wl = warp(lo);
  const double wh = warp(hi);
  const double q = (w * w - wl * wh) / (w * (wh - wl));
  return 1.0 / std::sqrt(1.0 + std::pow(q * q, order));
}

/// Straightforward iAAFT on a power-of-two length series starting from a
/// given permutation, stopping on |dMSE| < threshold. Returns the final
/// surrogate.
inline std::vector<double> reference_iaaft(std::span<const double> x, std::vector<double> r, std::size_t max_iter,
                                           double threshold) {
  const std::size_t n = x.size();
  const auto target = amplitude(x);
  std::vector<double> sorted(x.begin(), x.end());
  std::sort(sorted.begin(), sorted.end());
  double prev = -1.0;
  for (std::size_t it = 0; it < max_iter; ++it) {
    std::vector<cd> spec(r.begin(), r.end());
    radix2(spec, false);
    for (std::size_t k = 0; k < n; ++k) {
      const double phase = std::arg(spec[k]);
      spec[k] = std::polar(target[k], phase);
    }
    radix2(spec, true);
    std::vector<std::size_t> idx(n);
    std::iota(idx.begin(), idx.end(), std::size_t{0});
    std::stable_sort(idx.begin(), idx.end(), [&](std::size_t a, std::size_t b) { return spec[a].real() < spec[b].real(); });
    for (std::size_t m = 0; m < n; ++m) r[idx[m]] = sorted[m];
    const auto mag = amplitude(r);
    double mse = 0.0;
    for (std::size_t k = 0; k < n; ++k) mse += (mag[k] - target[k]) * (mag[k] - target[k]);
    mse /= static_cast<double>(n);
    if (it > 0 && std::abs(mse - prev) < threshold) break;
    prev = mse;
  }
  return r;
}

}  // namespace oracle
