#pragma once

// Iterative amplitude-adjusted Fourier transform surrogates with optional
// pinned samples. All three engines share one loop: a phase step that
// imposes the original amplitude spectrum on the current surrogate's
// phases, then an amplitude step that rank-matches the free positions
// against the sorted original free values and restores pinned positions.

#include <algorithm>
#include <cmath>
#include <complex>
#include <cstdint>
#include <limits>
#include <numbers>
#include <optional>
#include <random>
#include <span>
#include <utility>
#include <vector>

#include "cpsurr/fft.hpp"
#include "cpsurr/peaks.hpp"
#include "cpsurr/signal.hpp"

namespace cpsurr {

struct IaaftConfig {
  std::size_t n_surrogates = 1;
  std::size_t max_iter = 1000;
  double mse_threshold = 1e-6;
  double edge_fraction = 0.10;
  std::size_t point_margin = 5;
  std::uint64_t rng_seed = 0;

  static IaaftConfig fixed_edges_defaults() { return {}; }
  static IaaftConfig fixed_points_defaults() {
    IaaftConfig c;
    c.max_iter = 3000;
    return c;
  }

  void validate() const {
    if (n_surrogates < 1) throw Error(ErrorKind::invalid_argument, "n_surrogates must be >= 1");
    if (max_iter < 1) throw Error(ErrorKind::invalid_argument, "max_iter must be >= 1");
    if (!(mse_threshold > 0.0)) throw Error(ErrorKind::invalid_argument, "mse_threshold must be > 0");
    if (!(edge_fraction >= 0.0 && edge_fraction < 0.5)) {
      throw Error(ErrorKind::invalid_argument, "edge_fraction must lie in [0, 0.5)");
    }
  }
};

struct SurrogateSet {
  std::vector<std::vector<double>> surrogates;
  std::vector<std::size_t> iterations_used;
  std::vector<double> final_spectrum_mse;
  /// Sorted positions pinned to the original (edges or expanded points).
  std::vector<std::size_t> fixed_positions;
  /// True when every position was pinned and the surrogates are copies.
  bool degenerate = false;

  std::size_t size() const noexcept { return surrogates.size(); }
};

inline std::uint64_t splitmix64(std::uint64_t x) noexcept {
  x += 0x9e3779b97f4a7c15ULL;
  x = (x ^ (x >> 30)) * 0xbf58476d1ce4e5b9ULL;
  x = (x ^ (x >> 27)) * 0x94d049bb133111ebULL;
  return x ^ (x >> 31);
}

/// Generator for surrogate `index` of a run seeded with `seed`.
inline std::mt19937_64 surrogate_rng(std::uint64_t seed, std::uint64_t index) {
  return std::mt19937_64(splitmix64(splitmix64(seed) ^ index));
}

/// Unbiased draw in [0, bound) by rejection; portable across standard
/// libraries, unlike std::uniform_int_distribution.
inline std::uint64_t bounded_draw(std::mt19937_64& rng, std::uint64_t bound) {
  const std::uint64_t limit = std::numeric_limits<std::uint64_t>::max() -
                              std::numeric_limits<std::uint64_t>::max() % bound;
  std::uint64_t v;
  do {
    v = rng();
  } while (v >= limit);
  return v % bound;
}

/// Copy of x with the values at free positions randomly permuted among
/// themselves (Fisher-Yates); pinned positions untouched.
inline std::vector<double> shuffle_free(std::span<const double> x, std::span<const std::size_t> free_positions,
                                        std::mt19937_64& rng) {
  std::vector<double> r(x.begin(), x.end());
  const std::size_t m = free_positions.size();
  for (std::size_t i = m; i > 1; --i) {
    const std::size_t j = bounded_draw(rng, i);
    std::swap(r[free_positions[i - 1]], r[free_positions[j]]);
  }
  return r;
}

/// Starting point of surrogate `index`: the shuffle the engine begins from.
inline std::vector<double> initial_shuffle(std::span<const double> x, std::span<const std::size_t> free_positions,
                                           std::uint64_t seed, std::uint64_t index) {
  auto rng = surrogate_rng(seed, index);
  return shuffle_free(x, free_positions, rng);
}

namespace detail {

struct EngineResult {
  std::vector<double> surrogate;
  std::size_t iterations = 0;
  double mse = 0.0;
};

class ConstrainedIaaft {
 public:
  ConstrainedIaaft(std::span<const double> x, std::vector<bool> fixed_mask)
      : x_(x.begin(), x.end()), fixed_(std::move(fixed_mask)), fft_(x.size()) {
    for (std::size_t i = 0; i < x_.size(); ++i) {
      if (!fixed_[i]) free_.push_back(i);
    }
    sorted_free_.reserve(free_.size());
    for (std::size_t i : free_) sorted_free_.push_back(x_[i]);
    std::sort(sorted_free_.begin(), sorted_free_.end());
    const auto spec = fft_.forward(x_);
    amplitude_.resize(spec.size());
    for (std::size_t k = 0; k < spec.size(); ++k) amplitude_[k] = std::abs(spec[k]);
    spec_.resize(fft_.bins());
    s_.resize(x_.size());
    order_.resize(free_.size());
  }

  const std::vector<std::size_t>& free_positions() const noexcept { return free_; }

  EngineResult run(std::vector<double> r, std::size_t max_iter, double threshold) {
    EngineResult out;
    fft_.forward(r, spec_);
    std::optional<double> prev;
    while (out.iterations < max_iter) {
      phase_step();
      amplitude_step(r);
      fft_.forward(r, spec_);
      out.mse = spectrum_mse();
      ++out.iterations;
      if (prev && std::abs(out.mse - *prev) < threshold) break;
      prev = out.mse;
    }
    out.surrogate = std::move(r);
    return out;
  }

  /// Mean squared difference of |FFT(r)| and the original amplitude over the
  /// full two-sided spectrum; spec_ must hold FFT(r).
  double spectrum_mse() const {
    const std::size_t n = x_.size();
    double acc = 0.0;
    for (std::size_t k = 0; k < spec_.size(); ++k) {
      const double d = std::abs(spec_[k]) - amplitude_[k];
      acc += two_sided_weight(k, n) * d * d;
    }
    return acc / static_cast<double>(n);
  }

 private:
  void phase_step() {
    for (std::size_t k = 0; k < spec_.size(); ++k) {
      const double mag = std::abs(spec_[k]);
      spec_[k] = mag > 0.0 ? spec_[k] * (amplitude_[k] / mag) : std::complex<double>(amplitude_[k], 0.0);
    }
    fft_.inverse(spec_, s_);
  }

  void amplitude_step(std::vector<double>& r) {
    for (std::size_t m = 0; m < free_.size(); ++m) order_[m] = {s_[free_[m]], free_[m]};
    std::sort(order_.begin(), order_.end());
    for (std::size_t i = 0; i < r.size(); ++i) {
      if (fixed_[i]) r[i] = x_[i];
    }
    for (std::size_t m = 0; m < order_.size(); ++m) r[order_[m].second] = sorted_free_[m];
  }

  std::vector<double> x_;
  std::vector<bool> fixed_;
  std::vector<std::size_t> free_;
  std::vector<double> sorted_free_;
  std::vector<double> amplitude_;
  RealFft fft_;
  std::vector<std::complex<double>> spec_;
  std::vector<double> s_;
  std::vector<std::pair<double, std::size_t>> order_;
};

inline SurrogateSet run_engine(std::span<const double> x, std::vector<bool> fixed_mask, const IaaftConfig& cfg) {
  SurrogateSet out;
  for (std::size_t i = 0; i < fixed_mask.size(); ++i) {
    if (fixed_mask[i]) out.fixed_positions.push_back(i);
  }
  if (out.fixed_positions.size() == x.size()) {
    out.degenerate = true;
    for (std::size_t a = 0; a < cfg.n_surrogates; ++a) {
      out.surrogates.emplace_back(x.begin(), x.end());
      out.iterations_used.push_back(0);
      out.final_spectrum_mse.push_back(0.0);
    }
    return out;
  }
  ConstrainedIaaft engine(x, std::move(fixed_mask));
  for (std::size_t a = 0; a < cfg.n_surrogates; ++a) {
    auto start = initial_shuffle(x, engine.free_positions(), cfg.rng_seed, a);
    auto res = engine.run(std::move(start), cfg.max_iter, cfg.mse_threshold);
    out.surrogates.push_back(std::move(res.surrogate));
    out.iterations_used.push_back(res.iterations);
    out.final_spectrum_mse.push_back(res.mse);
  }
  return out;
}

inline void check_engine_input(std::span<const double> x, const IaaftConfig& cfg) {
  cfg.validate();
  if (x.size() < 4) throw Error(ErrorKind::insufficient_length, "iAAFT needs at least 4 samples");
}

}  // namespace detail

/// Number of pinned samples at each end for a segment of length n.
inline std::size_t edge_margin(std::size_t n, double edge_fraction) {
  return static_cast<std::size_t>(std::floor(edge_fraction * static_cast<double>(n)));
}

/// Sorted union of [max(0, i-m), min(n, i+m+1)) over all fixed indices.
inline std::vector<std::size_t> expand_fixed(std::span<const std::size_t> fixed, std::size_t margin, std::size_t n) {
  std::vector<bool> mask(n, false);
  for (std::size_t i : fixed) {
    if (i >= n) throw Error(ErrorKind::invalid_argument, "fixed index " + std::to_string(i) + " out of range");
    const std::size_t lo = i >= margin ? i - margin : 0;
    const std::size_t hi = std::min(n, i + margin + 1);
    for (std::size_t j = lo; j < hi; ++j) mask[j] = true;
  }
  std::vector<std::size_t> out;
  for (std::size_t j = 0; j < n; ++j) {
    if (mask[j]) out.push_back(j);
  }
  return out;
}

inline SurrogateSet iaaft(std::span<const double> x, const IaaftConfig& cfg) {
  detail::check_engine_input(x, cfg);
  return detail::run_engine(x, std::vector<bool>(x.size(), false), cfg);
}

inline SurrogateSet iaaft(const Signal& signal, const IaaftConfig& cfg) { return iaaft(signal.samples(), cfg); }

/// The first and last floor(edge_fraction * N) samples are pinned.
inline SurrogateSet iaaft_fixed_edges(std::span<const double> x, const IaaftConfig& cfg) {
  detail::check_engine_input(x, cfg);
  const std::size_t n = x.size();
  const std::size_t margin = edge_margin(n, cfg.edge_fraction);
  if (2 * margin >= n) {
    throw Error(ErrorKind::invalid_margin,
                "edge margin " + std::to_string(margin) + " leaves no interior in " + std::to_string(n) + " samples");
  }
  std::vector<bool> mask(n, false);
  for (std::size_t i = 0; i < margin; ++i) {
    mask[i] = true;
    mask[n - 1 - i] = true;
  }
  return detail::run_engine(x, std::move(mask), cfg);
}

inline SurrogateSet iaaft_fixed_edges(const Signal& signal, const IaaftConfig& cfg) {
  return iaaft_fixed_edges(signal.samples(), cfg);
}

/// Every fixed index plus point_margin neighbours on each side is pinned.
inline SurrogateSet iaaft_fixed_points(std::span<const double> x, std::span<const std::size_t> fixed,
                                       const IaaftConfig& cfg) {
  detail::check_engine_input(x, cfg);
  std::vector<bool> mask(x.size(), false);
  for (std::size_t i : expand_fixed(fixed, cfg.point_margin, x.size())) mask[i] = true;
  return detail::run_engine(x, std::move(mask), cfg);
}

inline SurrogateSet iaaft_fixed_points(const Signal& signal, const FixedIndexSet& fixed, const IaaftConfig& cfg) {
  return iaaft_fixed_points(signal.samples(), fixed.indices, cfg);
}

/// Gaussian kernel with radius round(4 sigma), normalised to unit sum.
inline std::vector<double> gaussian_kernel(double sigma) {
  if (!(sigma > 0.0)) throw Error(ErrorKind::invalid_argument, "sigma must be > 0");
  const auto radius = static_cast<std::ptrdiff_t>(4.0 * sigma + 0.5);
  std::vector<double> k(static_cast<std::size_t>(2 * radius + 1));
  double sum = 0.0;
  for (std::ptrdiff_t i = -radius; i <= radius; ++i) {
    const double v = std::exp(-0.5 * static_cast<double>(i * i) / (sigma * sigma));
    k[static_cast<std::size_t>(i + radius)] = v;
    sum += v;
  }
  for (double& v : k) v /= sum;
  return k;
}

/// Convolution with a half-sample symmetric reflection at both ends
/// (d c b a | a b c d | d c b a).
inline std::vector<double> gaussian_filter(std::span<const double> x, double sigma) {
  const auto kernel = gaussian_kernel(sigma);
  const auto radius = static_cast<std::ptrdiff_t>(kernel.size() / 2);
  const auto n = static_cast<std::ptrdiff_t>(x.size());
  auto reflect = [n](std::ptrdiff_t i) {
    const std::ptrdiff_t period = 2 * n;
    i %= period;
    if (i < 0) i += period;
    return i < n ? i : period - 1 - i;
  };
  std::vector<double> y(x.size(), 0.0);
  for (std::ptrdiff_t i = 0; i < n; ++i) {
    double acc = 0.0;
    for (std::ptrdiff_t j = -radius; j <= radius; ++j) {
      acc += kernel[static_cast<std::size_t>(j + radius)] * x[static_cast<std::size_t>(reflect(i + j))];
    }
    y[static_cast<std::size_t>(i)] = acc;
  }
  return y;
}

/// Smooths a surrogate while leaving detected peaks untouched: peak samples
/// are removed and bridged linearly, the series is Gaussian filtered, then
/// the peak values are put back. gap_fill indices are smoothed like any
/// other sample.
inline std::vector<double> smooth_preserving_peaks(std::span<const double> surrogate, const FixedIndexSet& fixed,
                                                   double sigma) {
  const std::size_t n = surrogate.size();
  std::vector<bool> removed(n, false);
  for (std::size_t i = 0; i < fixed.size(); ++i) {
    if (fixed.kinds[i] == FixedKind::detected_peak && fixed.indices[i] < n) removed[fixed.indices[i]] = true;
  }
  std::vector<double> bridged(surrogate.begin(), surrogate.end());
  std::size_t i = 0;
  while (i < n) {
    if (!removed[i]) {
      ++i;
      continue;
    }
    std::size_t end = i;
    while (end < n && removed[end]) ++end;
    const bool has_left = i > 0;
    const bool has_right = end < n;
    if (!has_left && !has_right) return {surrogate.begin(), surrogate.end()};
    const double left = has_left ? surrogate[i - 1] : surrogate[end];
    const double right = has_right ? surrogate[end] : surrogate[i - 1];
    const double span = static_cast<double>(end - i + 1);
    for (std::size_t j = i; j < end; ++j) {
      const double t = static_cast<double>(j - i + 1) / span;
      bridged[j] = left + t * (right - left);
    }
    i = end;
  }
  auto out = gaussian_filter(bridged, sigma);
  for (std::size_t j = 0; j < n; ++j) {
    if (removed[j]) out[j] = surrogate[j];
  }
  return out;
}

}  // namespace cpsurr
