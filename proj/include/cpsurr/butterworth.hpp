#pragma once

// Digital Butterworth band-pass design (bilinear transform, pre-warped band
// edges) realised as a cascade of second-order sections.

#include <algorithm>
#include <array>
#include <cmath>
#include <complex>
#include <numbers>
#include <span>
#include <string>
#include <vector>

#include "cpsurr/signal.hpp"

namespace cpsurr {

struct BandSpec {
  std::string name;
  double low_hz = 0.0;
  double high_hz = 0.0;
};

inline const BandSpec theta_band{"theta_power", 4.0, 8.0};
inline const BandSpec alpha_band{"alpha_power", 8.0, 12.0};
inline const BandSpec beta_band{"beta_power", 12.0, 30.0};

/// y[n] = b0 x[n] + b1 x[n-1] + b2 x[n-2] - a1 y[n-1] - a2 y[n-2]
struct Biquad {
  std::array<double, 3> b{};
  std::array<double, 2> a{};
};

class SosFilter {
 public:
  SosFilter() = default;
  explicit SosFilter(std::vector<Biquad> sections) : sections_(std::move(sections)) {}

  const std::vector<Biquad>& sections() const noexcept { return sections_; }
  std::size_t order() const noexcept { return 2 * sections_.size(); }

  /// Causal, zero initial state, transposed direct form II per section.
  std::vector<double> apply(std::span<const double> x) const {
    std::vector<double> y(x.begin(), x.end());
    for (const auto& s : sections_) {
      double z1 = 0.0;
      double z2 = 0.0;
      for (double& v : y) {
        const double in = v;
        const double out = s.b[0] * in + z1;
        z1 = s.b[1] * in - s.a[0] * out + z2;
        z2 = s.b[2] * in - s.a[1] * out;
        v = out;
      }
    }
    return y;
  }

  /// Complex frequency response at f_hz for sampling rate fs.
  std::complex<double> response(double f_hz, double fs) const {
    const std::complex<double> zinv = std::polar(1.0, -2.0 * std::numbers::pi * f_hz / fs);
    std::complex<double> h{1.0, 0.0};
    for (const auto& s : sections_) {
      const auto num = s.b[0] + s.b[1] * zinv + s.b[2] * zinv * zinv;
      const auto den = 1.0 + s.a[0] * zinv + s.a[1] * zinv * zinv;
      h *= num / den;
    }
    return h;
  }

 private:
  std::vector<Biquad> sections_;
};

/// Band-pass of prototype order `order` (the resulting filter has 2*order
/// poles, one biquad per prototype pole).
inline SosFilter butterworth_bandpass(int order, double low_hz, double high_hz, double fs) {
  if (order < 1) {
    throw Error(ErrorKind::invalid_argument, "filter order must be >= 1");
  }
  const double nyquist = fs / 2.0;
  if (!(low_hz > 0.0) || !(high_hz > low_hz) || !(high_hz < nyquist)) {
    throw Error(ErrorKind::invalid_band,
                "band [" + std::to_string(low_hz) + ", " + std::to_string(high_hz) +
                    "] Hz must satisfy 0 < low < high < fs/2 = " + std::to_string(nyquist));
  }
  using cd = std::complex<double>;
  constexpr double pi = std::numbers::pi;
  const double k2fs = 2.0 * fs;
  const double wl = k2fs * std::tan(pi * low_hz / fs);
  const double wh = k2fs * std::tan(pi * high_hz / fs);
  const double bw = wh - wl;
  const double w0sq = wl * wh;

  // Analog prototype poles, then lowpass -> bandpass. Each prototype pole maps
  // to two analog poles; the 'order' zeros at s=0 map to z=+1 and the 'order'
  // zeros at infinity map to z=-1.
  std::vector<cd> poles;
  poles.reserve(2 * static_cast<std::size_t>(order));
  for (int k = 0; k < order; ++k) {
    const cd p = std::polar(1.0, pi * (2.0 * k + order + 1) / (2.0 * order));
    const cd half = p * bw / 2.0;
    const cd root = std::sqrt(half * half - w0sq);
    poles.push_back(half + root);
    poles.push_back(half - root);
  }

  cd gain = std::pow(bw, order);
  // Bilinear map of poles, accumulating the gain correction.
  std::vector<cd> zpoles;
  zpoles.reserve(poles.size());
  cd den{1.0, 0.0};
  for (const cd& p : poles) {
    zpoles.push_back((k2fs + p) / (k2fs - p));
    den *= (k2fs - p);
  }
  // zeros at s=0 contribute (2fs - 0) each
  gain *= std::pow(k2fs, order) / den;
  const double k_real = gain.real();

  // Pair each upper-half-plane pole with its conjugate; left-over real poles
  // pair with each other.
  constexpr double imag_tol = 1e-12;
  std::vector<cd> complex_poles;
  std::vector<double> real_poles;
  for (const cd& z : zpoles) {
    if (z.imag() > imag_tol) {
      complex_poles.push_back(z);
    } else if (std::abs(z.imag()) <= imag_tol) {
      real_poles.push_back(z.real());
    }
  }
  std::sort(complex_poles.begin(), complex_poles.end(),
            [](const cd& a, const cd& b) { return std::abs(a) < std::abs(b); });
  std::sort(real_poles.begin(), real_poles.end());

  std::vector<Biquad> sections;
  for (const cd& z : complex_poles) {
    Biquad s;
    s.a = {-2.0 * z.real(), std::norm(z)};
    sections.push_back(s);
  }
  for (std::size_t i = 0; i + 1 < real_poles.size(); i += 2) {
    Biquad s;
    s.a = {-(real_poles[i] + real_poles[i + 1]), real_poles[i] * real_poles[i + 1]};
    sections.push_back(s);
  }
  if (sections.size() != static_cast<std::size_t>(order)) {
    throw Error(ErrorKind::invalid_argument, "butterworth pole pairing failed");
  }
  // Every section gets one zero at +1 and one at -1: (1 - z^-2).
  for (auto& s : sections) {
    s.b = {1.0, 0.0, -1.0};
  }
  sections.front().b = {k_real, 0.0, -k_real};
  return SosFilter(std::move(sections));
}

}  // namespace cpsurr
