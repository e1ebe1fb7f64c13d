#pragma once

// Diagnostic sequences: squared band-pass output and end-aligned rolling
// window statistics.

#include <algorithm>
#include <cmath>
#include <span>
#include <string>
#include <vector>

#include "cpsurr/butterworth.hpp"
#include "cpsurr/signal.hpp"

namespace cpsurr {

struct RollingConfig {
  std::size_t window = 64;
  std::size_t stride = 1;
};

enum class Moment { mean, variance, kurtosis };

inline std::string to_string(Moment m) {
  switch (m) {
    case Moment::mean: return "mean";
    case Moment::variance: return "variance";
    case Moment::kurtosis: return "kurtosis";
  }
  return "unknown";
}

inline constexpr int bandpass_order = 5;

/// Squared output of a causal 5th-order Butterworth band-pass.
///
/// The filter starts in steady state at the level of the first sample
/// (equivalently, that level is subtracted first; the band-pass has no DC
/// gain). A constant signal therefore gives an all-zero sequence instead of
/// a startup transient.
inline DiagnosticSequence bandpass_power(const Signal& signal, const BandSpec& band) {
  const auto filter = butterworth_bandpass(bandpass_order, band.low_hz, band.high_hz, signal.fs());
  DiagnosticSequence out;
  out.feature = band.name;
  std::vector<double> centred = signal.values();
  const double level = centred.front();
  for (double& v : centred) v -= level;
  out.values = filter.apply(centred);
  for (double& v : out.values) {
    v *= v;
  }
  return out;
}

namespace detail {

inline void check_rolling(const Signal& signal, const RollingConfig& cfg, std::size_t min_window) {
  if (cfg.window < min_window || cfg.stride < 1) {
    throw Error(ErrorKind::invalid_argument,
                "rolling window must be >= " + std::to_string(min_window) + " with stride >= 1");
  }
  if (signal.size() < cfg.window) {
    throw Error(ErrorKind::insufficient_length,
                "signal of length " + std::to_string(signal.size()) +
                    " is shorter than the rolling window " + std::to_string(cfg.window));
  }
}

inline bool is_constant(std::span<const double> x) {
  const auto [lo, hi] = std::minmax_element(x.begin(), x.end());
  return *lo == *hi;
}

// Exact for constant input.
inline double mean_of(std::span<const double> x) {
  if (is_constant(x)) return x.front();
  double s = 0.0;
  for (double v : x) s += v;
  return s / static_cast<double>(x.size());
}

// Population variance, exactly zero for constant input.
inline double variance_of(std::span<const double> x) {
  if (is_constant(x)) return 0.0;
  const double m = mean_of(x);
  double s = 0.0;
  for (double v : x) s += (v - m) * (v - m);
  return s / static_cast<double>(x.size());
}

inline std::vector<double> diff(std::span<const double> x) {
  std::vector<double> d;
  if (x.size() < 2) return d;
  d.reserve(x.size() - 1);
  for (std::size_t i = 1; i < x.size(); ++i) d.push_back(x[i] - x[i - 1]);
  return d;
}

template <typename WindowFn>
DiagnosticSequence roll(const Signal& signal, const RollingConfig& cfg, std::string feature,
                        WindowFn&& fn) {
  DiagnosticSequence out;
  out.feature = std::move(feature);
  out.start_offset = cfg.window - 1;
  out.stride = cfg.stride;
  const auto x = signal.samples();
  for (std::size_t start = 0; start + cfg.window <= x.size(); start += cfg.stride) {
    bool degenerate = false;
    out.values.push_back(fn(x.subspan(start, cfg.window), degenerate));
    if (degenerate) out.degenerate.push_back(out.values.size() - 1);
  }
  return out;
}

}  // namespace detail

/// One value per window position, attributed to the window's last sample.
/// Variance is the population variance; kurtosis is excess kurtosis and is
/// 0 (flagged degenerate) on a zero-variance window.
inline DiagnosticSequence rolling_moment(const Signal& signal, const RollingConfig& cfg, Moment moment) {
  detail::check_rolling(signal, cfg, 2);
  switch (moment) {
    case Moment::mean:
      return detail::roll(signal, cfg, "mean", [](std::span<const double> w, bool&) {
        return detail::mean_of(w);
      });
    case Moment::variance:
      return detail::roll(signal, cfg, "variance", [](std::span<const double> w, bool&) {
        return detail::variance_of(w);
      });
    case Moment::kurtosis:
      return detail::roll(signal, cfg, "kurtosis", [](std::span<const double> w, bool& degenerate) {
        if (detail::is_constant(w)) {
          degenerate = true;
          return 0.0;
        }
        const double m = detail::mean_of(w);
        double m2 = 0.0;
        double m4 = 0.0;
        for (double v : w) {
          const double d2 = (v - m) * (v - m);
          m2 += d2;
          m4 += d2 * d2;
        }
        const double n = static_cast<double>(w.size());
        m2 /= n;
        m4 /= n;
        if (m2 <= 0.0) {
          degenerate = true;
          return 0.0;
        }
        return m4 / (m2 * m2) - 3.0;
      });
  }
  throw Error(ErrorKind::invalid_argument, "unknown moment");
}

/// Hjorth complexity per window: mobility(diff(x)) / mobility(x) with
/// mobility(x) = sqrt(var(diff x) / var(x)).
inline double hjorth_complexity_of(std::span<const double> w, bool& degenerate) {
  const auto d1 = detail::diff(w);
  const auto d2 = detail::diff(d1);
  const double v0 = detail::variance_of(w);
  const double v1 = detail::variance_of(d1);
  const double v2 = detail::variance_of(d2);
  if (v0 <= 0.0 || v1 <= 0.0) {
    degenerate = true;
    return 0.0;
  }
  const double mobility = std::sqrt(v1 / v0);
  const double mobility_d = std::sqrt(v2 / v1);
  return mobility_d / mobility;
}

inline DiagnosticSequence hjorth_complexity(const Signal& signal, const RollingConfig& cfg) {
  detail::check_rolling(signal, cfg, 3);
  return detail::roll(signal, cfg, "hjorth_complexity", hjorth_complexity_of);
}

}  // namespace cpsurr
