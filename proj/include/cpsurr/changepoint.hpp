#pragma once

// Offline changepoint detection on diagnostic sequences: exponentially
// weighted averaging, lagged differencing, sigma-excursion detection with a
// neighbourhood density confirmation, then cross-feature merging subject to
// a minimum separation.

#include <algorithm>
#include <cmath>
#include <map>
#include <set>
#include <span>
#include <string>
#include <vector>

#include "cpsurr/features.hpp"
#include "cpsurr/signal.hpp"

namespace cpsurr {

struct ChangepointConfig {
  double lambda = 0.9;
  std::size_t kappa = 16;
  double sigma_mult = 4.0;
  double density = 0.7;
  std::size_t min_separation = 256;
  std::size_t warmup = 64;
  RollingConfig rolling{};

  void validate() const {
    if (!(lambda > 0.0 && lambda < 1.0)) throw Error(ErrorKind::invalid_argument, "lambda must lie in (0, 1)");
    if (kappa < 1) throw Error(ErrorKind::invalid_argument, "kappa must be >= 1");
    if (!(sigma_mult > 0.0)) throw Error(ErrorKind::invalid_argument, "sigma_mult must be > 0");
    if (!(density > 0.0 && density <= 1.0)) throw Error(ErrorKind::invalid_argument, "density must lie in (0, 1]");
    if (min_separation < 1) throw Error(ErrorKind::invalid_argument, "min_separation must be >= 1");
  }
};

struct EwmaSequence {
  std::vector<double> values;
  std::vector<double> normalizers;

  std::size_t size() const noexcept { return values.size(); }
};

/// values[j] = ewma[j + start_offset] - ewma[j], so start_offset equals kappa.
struct LaggedDiffSequence {
  std::vector<double> values;
  std::size_t start_offset = 0;

  std::size_t size() const noexcept { return values.size(); }
};

struct ChangepointSet {
  std::vector<std::size_t> indices;
  std::map<std::string, std::vector<std::size_t>> per_feature;
};

enum class Feature { theta_power, alpha_power, beta_power, hjorth_complexity, variance, mean, kurtosis };

inline std::string to_string(Feature f) {
  switch (f) {
    case Feature::theta_power: return theta_band.name;
    case Feature::alpha_power: return alpha_band.name;
    case Feature::beta_power: return beta_band.name;
    case Feature::hjorth_complexity: return "hjorth_complexity";
    case Feature::variance: return "variance";
    case Feature::mean: return "mean";
    case Feature::kurtosis: return "kurtosis";
  }
  return "unknown";
}

inline std::vector<Feature> default_features() {
  return {Feature::theta_power, Feature::alpha_power, Feature::beta_power, Feature::hjorth_complexity,
          Feature::variance,    Feature::mean,        Feature::kurtosis};
}

inline DiagnosticSequence diagnostic_sequence(const Signal& signal, Feature f, const RollingConfig& rolling) {
  switch (f) {
    case Feature::theta_power: return bandpass_power(signal, theta_band);
    case Feature::alpha_power: return bandpass_power(signal, alpha_band);
    case Feature::beta_power: return bandpass_power(signal, beta_band);
    case Feature::hjorth_complexity: return hjorth_complexity(signal, rolling);
    case Feature::variance: return rolling_moment(signal, rolling, Moment::variance);
    case Feature::mean: return rolling_moment(signal, rolling, Moment::mean);
    case Feature::kurtosis: return rolling_moment(signal, rolling, Moment::kurtosis);
  }
  throw Error(ErrorKind::invalid_argument, "unknown feature");
}

/// Recursive form of the normalised exponentially weighted average:
/// num_n = lambda num_{n-1} + x_n, w_n = lambda w_{n-1} + 1.
inline EwmaSequence ewma(std::span<const double> diag, double lambda) {
  if (diag.empty()) throw Error(ErrorKind::empty_input, "ewma of an empty diagnostic sequence");
  if (!(lambda > 0.0 && lambda < 1.0)) throw Error(ErrorKind::invalid_argument, "lambda must lie in (0, 1)");
  EwmaSequence out;
  out.values.reserve(diag.size());
  out.normalizers.reserve(diag.size());
  double num = 0.0;
  double w = 0.0;
  for (double x : diag) {
    num = lambda * num + x;
    w = lambda * w + 1.0;
    out.values.push_back(num / w);
    out.normalizers.push_back(w);
  }
  return out;
}

inline EwmaSequence ewma(const DiagnosticSequence& diag, double lambda) { return ewma(diag.values, lambda); }

inline LaggedDiffSequence lagged_diff(const EwmaSequence& e, std::size_t kappa) {
  if (kappa < 1) throw Error(ErrorKind::invalid_argument, "kappa must be >= 1");
  if (kappa >= e.size()) {
    throw Error(ErrorKind::insufficient_length,
                "lag " + std::to_string(kappa) + " needs more than " + std::to_string(e.size()) + " samples");
  }
  LaggedDiffSequence out;
  out.start_offset = kappa;
  out.values.reserve(e.size() - kappa);
  for (std::size_t n = kappa; n < e.size(); ++n) {
    out.values.push_back(e.values[n] - e.values[n - kappa]);
  }
  return out;
}

/// Unweighted mean/std of a lagged-difference sequence with the first
/// `warmup` entries excluded. Those entries are also never reported as
/// exceeding the threshold.
struct ExcursionThreshold {
  double mean = 0.0;
  double stddev = 0.0;
  double sigma_mult = 4.0;
  std::size_t warmup = 0;

  bool exceeds(std::size_t i, double v) const noexcept {
    return i >= warmup && stddev > 0.0 && std::abs(v - mean) > sigma_mult * stddev;
  }
};

inline ExcursionThreshold excursion_threshold(const LaggedDiffSequence& ld, double sigma_mult, std::size_t warmup) {
  if (ld.size() <= warmup + 1) {
    throw Error(ErrorKind::insufficient_length, "lagged-difference sequence of length " + std::to_string(ld.size()) +
                                                    " is too short for warmup " + std::to_string(warmup));
  }
  ExcursionThreshold t;
  t.sigma_mult = sigma_mult;
  t.warmup = warmup;
  const std::span<const double> tail(ld.values.data() + warmup, ld.size() - warmup);
  if (detail::is_constant(tail)) {
    t.mean = tail.front();
    return t;
  }
  t.mean = detail::mean_of(tail);
  t.stddev = std::sqrt(detail::variance_of(tail));
  return t;
}

/// Two-sided excursions beyond sigma_mult standard deviations.
inline std::vector<std::size_t> detect_excursions(const LaggedDiffSequence& ld, double sigma_mult, std::size_t warmup) {
  const auto t = excursion_threshold(ld, sigma_mult, warmup);
  std::vector<std::size_t> out;
  for (std::size_t i = 0; i < ld.size(); ++i) {
    if (t.exceeds(i, ld.values[i])) out.push_back(i);
  }
  return out;
}

/// Keeps candidate i when at least ceil(density * m) of the m indices in
/// [floor(i - kappa/2), ceil(i + kappa/2)], clipped to the sequence, exceed
/// the threshold.
inline std::vector<std::size_t> confirm_density(std::span<const std::size_t> candidates, const LaggedDiffSequence& ld,
                                                std::size_t kappa, double density, const ExcursionThreshold& t) {
  std::vector<std::size_t> out;
  if (candidates.empty() || ld.size() == 0) return out;
  std::vector<std::size_t> prefix(ld.size() + 1, 0);
  for (std::size_t i = 0; i < ld.size(); ++i) {
    prefix[i + 1] = prefix[i] + (t.exceeds(i, ld.values[i]) ? 1 : 0);
  }
  // floor(i - k/2) and ceil(i + k/2) for integer i
  const std::size_t below = (kappa + 1) / 2;
  const std::size_t above = (kappa + 1) / 2;
  for (std::size_t i : candidates) {
    if (i >= ld.size()) continue;
    const std::size_t lo = i >= below ? i - below : 0;
    const std::size_t hi = std::min(ld.size() - 1, i + above);
    const std::size_t m = hi - lo + 1;
    const std::size_t hits = prefix[hi + 1] - prefix[lo];
    // guard against density * m landing a hair above an integer
    const auto needed = static_cast<std::size_t>(std::ceil(density * static_cast<double>(m) - 1e-9));
    if (hits >= needed) out.push_back(i);
  }
  return out;
}

inline std::vector<std::size_t> confirm_density(std::span<const std::size_t> candidates, const LaggedDiffSequence& ld,
                                                std::size_t kappa, double density, double sigma_mult,
                                                std::size_t warmup = 0) {
  return confirm_density(candidates, ld, kappa, density, excursion_threshold(ld, sigma_mult, warmup));
}

/// Greedy earliest-first filter: keep an index only when it is at least
/// min_separation after the previously kept one. Input must be sorted.
inline std::vector<std::size_t> filter_min_separation(std::span<const std::size_t> sorted, std::size_t min_separation) {
  std::vector<std::size_t> kept;
  for (std::size_t idx : sorted) {
    if (kept.empty() || idx - kept.back() >= min_separation) kept.push_back(idx);
  }
  return kept;
}

/// Translates each feature's indices by its offset, unions, sorts and
/// filters. Features without an entry in `offsets` use offset 0.
inline ChangepointSet merge_and_filter(const std::map<std::string, std::vector<std::size_t>>& per_feature,
                                       std::size_t min_separation,
                                       const std::map<std::string, std::size_t>& offsets = {}) {
  ChangepointSet out;
  std::set<std::size_t> all;
  for (const auto& [name, idx] : per_feature) {
    const auto it = offsets.find(name);
    const std::size_t off = it == offsets.end() ? 0 : it->second;
    auto& translated = out.per_feature[name];
    for (std::size_t i : idx) {
      translated.push_back(i + off);
      all.insert(i + off);
    }
    std::sort(translated.begin(), translated.end());
  }
  const std::vector<std::size_t> sorted(all.begin(), all.end());
  out.indices = filter_min_separation(sorted, min_separation);
  return out;
}

/// Confirmed changepoints of one feature, in original-signal coordinates.
inline std::vector<std::size_t> feature_changepoints(const Signal& signal, Feature f, const ChangepointConfig& cfg) {
  const auto diag = diagnostic_sequence(signal, f, cfg.rolling);
  const auto ld = lagged_diff(ewma(diag, cfg.lambda), cfg.kappa);
  const auto t = excursion_threshold(ld, cfg.sigma_mult, cfg.warmup);
  std::vector<std::size_t> candidates;
  for (std::size_t i = 0; i < ld.size(); ++i) {
    if (t.exceeds(i, ld.values[i])) candidates.push_back(i);
  }
  auto confirmed = confirm_density(candidates, ld, cfg.kappa, cfg.density, t);
  for (auto& i : confirmed) i = diag.sample_index(i + ld.start_offset);
  return confirmed;
}

inline ChangepointSet detect_changepoints(const Signal& signal, const std::vector<Feature>& features,
                                          const ChangepointConfig& cfg) {
  cfg.validate();
  std::map<std::string, std::vector<std::size_t>> per_feature;
  for (Feature f : features) per_feature[to_string(f)] = feature_changepoints(signal, f, cfg);
  return merge_and_filter(per_feature, cfg.min_separation);
}

inline ChangepointSet detect_changepoints(const Signal& signal, const ChangepointConfig& cfg = {}) {
  return detect_changepoints(signal, default_features(), cfg);
}

/// Pools every channel's feature changepoints before the separation filter.
/// per_feature keys are "<channel>/<feature>".
inline ChangepointSet detect_changepoints_union(const std::vector<Signal>& channels, const std::vector<Feature>& features,
                                                const ChangepointConfig& cfg) {
  cfg.validate();
  std::map<std::string, std::vector<std::size_t>> per_feature;
  for (std::size_t c = 0; c < channels.size(); ++c) {
    for (Feature f : features) {
      per_feature[std::to_string(c) + "/" + to_string(f)] = feature_changepoints(channels[c], f, cfg);
    }
  }
  return merge_and_filter(per_feature, cfg.min_separation);
}

}  // namespace cpsurr
