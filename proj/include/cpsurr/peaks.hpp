#pragma once

// R-peak style detection on a signal and its negation, plus equidistant
// gap filling so that no stretch between fixed indices exceeds a maximum
// interval.

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <numeric>
#include <optional>
#include <span>
#include <vector>

#include "cpsurr/features.hpp"
#include "cpsurr/signal.hpp"

namespace cpsurr {

struct PeakConfig {
  std::size_t min_distance = 50;
  std::size_t max_interval = 150;
  /// Minimum prominence; when unset, 0.5 * standard deviation of the signal.
  std::optional<double> prominence;
  /// Minimum |x - mean(x)| at a peak; when unset, 2.5 * standard deviation.
  /// Keeps the baseline between beats out of the inverted scan.
  std::optional<double> height;

  static PeakConfig config_a() { return {50, 150, std::nullopt, std::nullopt}; }
  static PeakConfig config_b() { return {60, 80, std::nullopt, std::nullopt}; }

  void validate() const {
    if (min_distance < 1) throw Error(ErrorKind::invalid_argument, "min_distance must be >= 1");
    if (max_interval < 2) throw Error(ErrorKind::invalid_argument, "max_interval must be >= 2");
  }
};

enum class FixedKind : std::uint8_t { detected_peak, gap_fill };

struct FixedIndexSet {
  std::vector<std::size_t> indices;
  std::vector<FixedKind> kinds;

  std::size_t size() const noexcept { return indices.size(); }
  bool empty() const noexcept { return indices.empty(); }

  std::vector<std::size_t> of_kind(FixedKind k) const {
    std::vector<std::size_t> out;
    for (std::size_t i = 0; i < indices.size(); ++i) {
      if (kinds[i] == k) out.push_back(indices[i]);
    }
    return out;
  }
};

namespace detail {

// Local maxima with plateau handling: a flat top bordered by strictly lower
// samples on both sides reports its middle (left-middle for even widths).
// Boundary samples never qualify.
inline std::vector<std::size_t> local_maxima(std::span<const double> x) {
  std::vector<std::size_t> peaks;
  const std::size_t n = x.size();
  std::size_t i = 1;
  while (i + 1 < n) {
    if (x[i - 1] < x[i]) {
      std::size_t ahead = i + 1;
      while (ahead + 1 < n && x[ahead] == x[i]) ++ahead;
      if (x[ahead] < x[i]) {
        peaks.push_back((i + ahead - 1) / 2);
        i = ahead;
        continue;
      }
    }
    ++i;
  }
  return peaks;
}

// Topographic prominence: the peak height above the higher of the two
// minima found walking outward until a strictly higher sample (or the edge).
inline double prominence(std::span<const double> x, std::size_t peak) {
  const double h = x[peak];
  double left_min = h;
  for (std::size_t i = peak; i-- > 0;) {
    if (x[i] > h) break;
    left_min = std::min(left_min, x[i]);
  }
  double right_min = h;
  for (std::size_t i = peak + 1; i < x.size(); ++i) {
    if (x[i] > h) break;
    right_min = std::min(right_min, x[i]);
  }
  return h - std::max(left_min, right_min);
}

// Keep the highest-priority peaks first, discarding any closer than
// min_distance to an already kept one. Ties go to the earlier index.
inline std::vector<std::size_t> enforce_distance(std::vector<std::size_t> peaks, std::span<const double> priority,
                                                 std::size_t min_distance) {
  std::vector<std::size_t> order(peaks.size());
  std::iota(order.begin(), order.end(), std::size_t{0});
  std::stable_sort(order.begin(), order.end(),
                   [&](std::size_t a, std::size_t b) { return priority[peaks[a]] > priority[peaks[b]]; });
  std::vector<std::size_t> kept;
  for (std::size_t o : order) {
    const std::size_t p = peaks[o];
    const bool clash = std::any_of(kept.begin(), kept.end(), [&](std::size_t k) {
      return (p > k ? p - k : k - p) < min_distance;
    });
    if (!clash) kept.push_back(p);
  }
  std::sort(kept.begin(), kept.end());
  return kept;
}

inline std::vector<std::size_t> find_peaks(std::span<const double> x, std::size_t min_distance, double min_prominence,
                                           double min_height) {
  std::vector<std::size_t> qualified;
  for (std::size_t p : local_maxima(x)) {
    if (x[p] >= min_height && prominence(x, p) >= min_prominence) qualified.push_back(p);
  }
  return enforce_distance(std::move(qualified), x, min_distance);
}

}  // namespace detail

/// Peaks of the signal and of its negation, merged. Within any pair closer
/// than min_distance the peak of larger |x - mean(x)| survives.
inline FixedIndexSet detect_peaks(const Signal& signal, const PeakConfig& cfg) {
  cfg.validate();
  if (signal.size() < 3) throw Error(ErrorKind::insufficient_length, "peak detection needs at least 3 samples");
  const auto x = signal.samples();
  const double mean = detail::mean_of(x);
  const double sd = std::sqrt(detail::variance_of(x));
  const double min_prom = cfg.prominence.value_or(0.5 * sd);
  const double min_height = cfg.height.value_or(2.5 * sd);

  std::vector<double> centered(x.size());
  std::vector<double> negated(x.size());
  std::vector<double> magnitude(x.size());
  for (std::size_t i = 0; i < x.size(); ++i) {
    centered[i] = x[i] - mean;
    negated[i] = -centered[i];
    magnitude[i] = std::abs(centered[i]);
  }
  auto merged = detail::find_peaks(centered, cfg.min_distance, min_prom, min_height);
  const auto inverted = detail::find_peaks(negated, cfg.min_distance, min_prom, min_height);
  merged.insert(merged.end(), inverted.begin(), inverted.end());
  std::sort(merged.begin(), merged.end());
  merged.erase(std::unique(merged.begin(), merged.end()), merged.end());

  FixedIndexSet out;
  out.indices = detail::enforce_distance(std::move(merged), magnitude, cfg.min_distance);
  out.kinds.assign(out.indices.size(), FixedKind::detected_peak);
  return out;
}

/// Inserts equidistant gap_fill indices wherever consecutive fixed indices
/// are more than max_interval apart. Samples 0 and n-1 act as virtual
/// anchors so leading and trailing stretches are bounded too. Positions are
/// a + j(b-a)/(k+1) rounded half up, k = ceil((b-a)/max_interval) - 1.
inline FixedIndexSet fill_gaps(const FixedIndexSet& peaks, std::size_t n, std::size_t max_interval) {
  if (n < 1) throw Error(ErrorKind::invalid_argument, "fill_gaps needs n >= 1");
  if (max_interval < 1) throw Error(ErrorKind::invalid_argument, "max_interval must be >= 1");
  for (std::size_t i : peaks.indices) {
    if (i >= n) throw Error(ErrorKind::invalid_argument, "fixed index " + std::to_string(i) + " out of range");
  }

  std::vector<std::size_t> anchors;
  anchors.reserve(peaks.size() + 2);
  if (peaks.empty() || peaks.indices.front() != 0) anchors.push_back(0);
  anchors.insert(anchors.end(), peaks.indices.begin(), peaks.indices.end());
  if (anchors.back() != n - 1) anchors.push_back(n - 1);

  std::vector<std::pair<std::size_t, FixedKind>> merged;
  for (std::size_t i = 0; i < peaks.size(); ++i) merged.emplace_back(peaks.indices[i], peaks.kinds[i]);
  for (std::size_t g = 0; g + 1 < anchors.size(); ++g) {
    const std::size_t a = anchors[g];
    const std::size_t b = anchors[g + 1];
    const std::size_t gap = b - a;
    if (gap <= max_interval) continue;
    const std::size_t k = (gap + max_interval - 1) / max_interval - 1;
    const std::size_t den = k + 1;
    for (std::size_t j = 1; j <= k; ++j) {
      const std::size_t num = j * gap;
      merged.emplace_back(a + (2 * num + den) / (2 * den), FixedKind::gap_fill);
    }
  }
  std::sort(merged.begin(), merged.end());
  FixedIndexSet out;
  for (const auto& [idx, kind] : merged) {
    if (!out.indices.empty() && out.indices.back() == idx) continue;
    out.indices.push_back(idx);
    out.kinds.push_back(kind);
  }
  return out;
}

}  // namespace cpsurr
