#pragma once

// Original-vs-surrogate comparison: periodogram, pooled-range histogram and
// Hann-windowed STFT magnitude, with one scalar distance per panel.

#include <algorithm>
#include <cmath>
#include <limits>
#include <numbers>
#include <span>
#include <vector>

#include "cpsurr/fft.hpp"
#include "cpsurr/signal.hpp"

namespace cpsurr {

inline constexpr std::size_t histogram_bins = 64;

struct Periodogram {
  std::vector<double> frequencies;
  std::vector<double> original;
  std::vector<double> surrogate;
};

struct Histogram {
  std::vector<double> edges;  // histogram_bins + 1 values
  std::vector<std::size_t> original;
  std::vector<std::size_t> surrogate;
};

/// Row-major frames x bins magnitude matrices.
struct Spectrogram {
  std::size_t window = 0;
  std::size_t hop = 0;
  std::size_t frames = 0;
  std::size_t bins = 0;
  std::vector<double> frame_times;
  std::vector<double> frequencies;
  std::vector<double> original;
  std::vector<double> surrogate;
};

struct SpectralReport {
  double fs = 1.0;
  Periodogram periodogram;
  Histogram histogram;
  Spectrogram spectrogram;
  double spectrum_rel_l2 = 0.0;
  double histogram_distance = 0.0;
  double spectrogram_rel_l2 = 0.0;
};

/// ||a - b||_2 / ||reference||_2; 0 when both are zero, +inf when only the
/// reference is.
inline double relative_l2(std::span<const double> a, std::span<const double> reference) {
  double num = 0.0;
  double den = 0.0;
  for (std::size_t i = 0; i < a.size(); ++i) {
    num += (a[i] - reference[i]) * (a[i] - reference[i]);
    den += reference[i] * reference[i];
  }
  if (num == 0.0) return 0.0;
  if (den == 0.0) return std::numeric_limits<double>::infinity();
  return std::sqrt(num / den);
}

/// ||FFT(s)| - |FFT(o)||_2 / ||FFT(o)||_2 over the full spectrum.
inline double spectrum_relative_error(std::span<const double> original, std::span<const double> surrogate) {
  if (original.size() != surrogate.size()) {
    throw Error(ErrorKind::length_mismatch, "spectrum comparison needs equal lengths");
  }
  return relative_l2(amplitude_spectrum(surrogate), amplitude_spectrum(original));
}

/// Total variation distance between the normalised histograms.
inline double total_variation(std::span<const std::size_t> a, std::span<const std::size_t> b) {
  double na = 0.0;
  double nb = 0.0;
  for (std::size_t v : a) na += static_cast<double>(v);
  for (std::size_t v : b) nb += static_cast<double>(v);
  if (na == 0.0 || nb == 0.0) return na == nb ? 0.0 : 1.0;
  double acc = 0.0;
  for (std::size_t i = 0; i < a.size(); ++i) {
    acc += std::abs(static_cast<double>(a[i]) / na - static_cast<double>(b[i]) / nb);
  }
  return 0.5 * acc;
}

inline Histogram pooled_histogram(std::span<const double> a, std::span<const double> b,
                                  std::size_t bins = histogram_bins) {
  double lo = std::numeric_limits<double>::infinity();
  double hi = -std::numeric_limits<double>::infinity();
  for (auto s : {a, b}) {
    for (double v : s) {
      lo = std::min(lo, v);
      hi = std::max(hi, v);
    }
  }
  Histogram h;
  h.original.assign(bins, 0);
  h.surrogate.assign(bins, 0);
  const double width = hi > lo ? (hi - lo) / static_cast<double>(bins) : 1.0;
  for (std::size_t i = 0; i <= bins; ++i) h.edges.push_back(lo + width * static_cast<double>(i));
  auto bin_of = [&](double v) {
    if (!(hi > lo)) return std::size_t{0};
    const auto k = static_cast<std::size_t>((v - lo) / width);
    return std::min(k, bins - 1);
  };
  for (double v : a) ++h.original[bin_of(v)];
  for (double v : b) ++h.surrogate[bin_of(v)];
  return h;
}

/// Hann window of length n (periodic form is not used; symmetric).
inline std::vector<double> hann(std::size_t n) {
  std::vector<double> w(n, 1.0);
  if (n < 2) return w;
  for (std::size_t i = 0; i < n; ++i) {
    w[i] = 0.5 - 0.5 * std::cos(2.0 * std::numbers::pi * static_cast<double>(i) / static_cast<double>(n - 1));
  }
  return w;
}

/// STFT magnitudes, frames starting at 0, hop apart, while they fit. A
/// window longer than the signal is shortened to the signal length.
inline std::vector<double> stft_magnitude(std::span<const double> x, std::size_t window, std::size_t hop,
                                          std::size_t& frames, std::size_t& bins) {
  window = std::min(window, x.size());
  const auto w = hann(window);
  RealFft fft(window);
  bins = fft.bins();
  frames = x.size() >= window ? (x.size() - window) / hop + 1 : 0;
  std::vector<double> out;
  out.reserve(frames * bins);
  std::vector<double> buf(window);
  std::vector<std::complex<double>> spec(bins);
  for (std::size_t f = 0; f < frames; ++f) {
    for (std::size_t i = 0; i < window; ++i) buf[i] = x[f * hop + i] * w[i];
    fft.forward(buf, spec);
    for (const auto& c : spec) out.push_back(std::abs(c));
  }
  return out;
}

inline SpectralReport compare(std::span<const double> original, std::span<const double> surrogate, double fs,
                              std::size_t stft_window = 256, std::size_t stft_hop = 64) {
  if (original.size() != surrogate.size()) {
    throw Error(ErrorKind::length_mismatch, "original has " + std::to_string(original.size()) +
                                                " samples but surrogate has " + std::to_string(surrogate.size()));
  }
  if (original.size() < 2) throw Error(ErrorKind::insufficient_length, "comparison needs at least 2 samples");
  if (stft_window < 2 || stft_hop < 1) {
    throw Error(ErrorKind::invalid_argument, "STFT window must be >= 2 and hop >= 1");
  }
  const std::size_t n = original.size();
  SpectralReport r;
  r.fs = fs;

  RealFft fft(n);
  const auto so = fft.forward(original);
  const auto ss = fft.forward(surrogate);
  for (std::size_t k = 0; k < so.size(); ++k) {
    r.periodogram.frequencies.push_back(static_cast<double>(k) * fs / static_cast<double>(n));
    r.periodogram.original.push_back(std::norm(so[k]) / static_cast<double>(n));
    r.periodogram.surrogate.push_back(std::norm(ss[k]) / static_cast<double>(n));
  }
  r.spectrum_rel_l2 = spectrum_relative_error(original, surrogate);

  r.histogram = pooled_histogram(original, surrogate);
  r.histogram_distance = total_variation(r.histogram.original, r.histogram.surrogate);

  auto& sg = r.spectrogram;
  sg.window = std::min(stft_window, n);
  sg.hop = stft_hop;
  sg.original = stft_magnitude(original, stft_window, stft_hop, sg.frames, sg.bins);
  sg.surrogate = stft_magnitude(surrogate, stft_window, stft_hop, sg.frames, sg.bins);
  for (std::size_t f = 0; f < sg.frames; ++f) {
    sg.frame_times.push_back((static_cast<double>(f * sg.hop) + 0.5 * static_cast<double>(sg.window)) / fs);
  }
  for (std::size_t k = 0; k < sg.bins; ++k) {
    sg.frequencies.push_back(static_cast<double>(k) * fs / static_cast<double>(sg.window));
  }
  r.spectrogram_rel_l2 = relative_l2(sg.surrogate, sg.original);
  return r;
}

inline SpectralReport compare(const Signal& original, std::span<const double> surrogate,
                              std::size_t stft_window = 256, std::size_t stft_hop = 64) {
  return compare(original.samples(), surrogate, original.fs(), stft_window, stft_hop);
}

}  // namespace cpsurr
