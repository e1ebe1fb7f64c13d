#pragma once

// Augmentation recipes.
//
// EEG: detect changepoints, cut the channel into segments [c_k, c_{k+1}),
// generate fixed-edges surrogates for each segment and concatenate them.
// ECG: detect peaks, gap-fill, fixed-points surrogates, then smooth away
// from the detected peaks.

#include <cstdint>
#include <string>
#include <vector>

#include "cpsurr/changepoint.hpp"
#include "cpsurr/iaaft.hpp"
#include "cpsurr/peaks.hpp"
#include "cpsurr/signal.hpp"

namespace cpsurr {

enum class Mode { eeg, ecg };

/// Segments shorter than this are copied verbatim.
inline constexpr std::size_t min_segment_length = 20;
inline constexpr double default_smoothing_sigma = 5.0;

struct AugmentationRequest {
  std::vector<Signal> channels;
  Mode mode = Mode::eeg;
  ChangepointConfig changepoint_cfg{};
  std::vector<Feature> features = default_features();
  bool union_channels = false;
  PeakConfig peak_cfg{};
  IaaftConfig iaaft_cfg{};
  std::size_t n_surrogates = 1;
  double smoothing_sigma = default_smoothing_sigma;
};

struct SegmentDiagnostics {
  std::size_t start = 0;
  std::size_t length = 0;
  bool copied = false;
  std::vector<std::size_t> iterations;
  std::vector<double> final_mse;
};

struct ChannelResult {
  std::vector<std::vector<double>> surrogates;
  std::vector<std::size_t> changepoints;
  FixedIndexSet fixed;
  std::vector<SegmentDiagnostics> segments;
};

struct AugmentationResult {
  std::vector<ChannelResult> channels;
};

/// An engine failure tagged with where it happened.
class SegmentError : public Error {
 public:
  SegmentError(const Error& cause, std::size_t channel, std::size_t segment)
      : Error(cause.kind(), "channel " + std::to_string(channel) + ", segment " + std::to_string(segment) + ": " +
                                cause.what()),
        channel_(channel),
        segment_(segment) {}

  std::size_t channel() const noexcept { return channel_; }
  std::size_t segment() const noexcept { return segment_; }

 private:
  std::size_t channel_;
  std::size_t segment_;
};

/// Seed for one (channel, segment) work unit of a run.
inline std::uint64_t derive_seed(std::uint64_t seed, std::uint64_t channel, std::uint64_t segment) {
  return splitmix64(splitmix64(splitmix64(seed) ^ channel) ^ segment);
}

/// Segment boundaries [start, end) for changepoints in (0, n).
inline std::vector<std::pair<std::size_t, std::size_t>> segment_bounds(std::span<const std::size_t> changepoints,
                                                                      std::size_t n) {
  std::vector<std::pair<std::size_t, std::size_t>> out;
  std::size_t start = 0;
  for (std::size_t c : changepoints) {
    if (c <= start || c >= n) continue;
    out.emplace_back(start, c);
    start = c;
  }
  out.emplace_back(start, n);
  return out;
}

/// Fixed-edges surrogates of each segment, concatenated. n_surrogates and
/// rng_seed come from cfg; each segment receives its own derived seed.
inline ChannelResult augment_segments(const Signal& signal, std::span<const std::size_t> changepoints,
                                      const IaaftConfig& cfg, std::size_t channel = 0) {
  cfg.validate();
  ChannelResult out;
  out.changepoints.assign(changepoints.begin(), changepoints.end());
  out.surrogates.assign(cfg.n_surrogates, std::vector<double>{});
  for (auto& s : out.surrogates) s.reserve(signal.size());
  const auto x = signal.samples();
  const auto bounds = segment_bounds(changepoints, x.size());
  for (std::size_t seg = 0; seg < bounds.size(); ++seg) {
    const auto [start, end] = bounds[seg];
    const auto piece = x.subspan(start, end - start);
    SegmentDiagnostics diag{start, piece.size(), false, {}, {}};
    if (piece.size() < min_segment_length) {
      diag.copied = true;
      for (auto& s : out.surrogates) s.insert(s.end(), piece.begin(), piece.end());
      diag.iterations.assign(cfg.n_surrogates, 0);
      diag.final_mse.assign(cfg.n_surrogates, 0.0);
    } else {
      IaaftConfig seg_cfg = cfg;
      seg_cfg.rng_seed = derive_seed(cfg.rng_seed, channel, seg);
      SurrogateSet set;
      try {
        set = iaaft_fixed_edges(piece, seg_cfg);
      } catch (const Error& e) {
        throw SegmentError(e, channel, seg);
      }
      for (std::size_t a = 0; a < cfg.n_surrogates; ++a) {
        out.surrogates[a].insert(out.surrogates[a].end(), set.surrogates[a].begin(), set.surrogates[a].end());
      }
      diag.iterations = std::move(set.iterations_used);
      diag.final_mse = std::move(set.final_spectrum_mse);
    }
    out.segments.push_back(std::move(diag));
  }
  return out;
}

inline void check_request(const AugmentationRequest& req) {
  if (req.channels.empty()) throw Error(ErrorKind::empty_input, "augmentation request has no channels");
  for (const auto& c : req.channels) {
    if (c.size() != req.channels.front().size() || c.fs() != req.channels.front().fs()) {
      throw Error(ErrorKind::length_mismatch, "all channels must share length and sampling rate");
    }
  }
  if (req.n_surrogates < 1) throw Error(ErrorKind::invalid_argument, "n_surrogates must be >= 1");
}

inline AugmentationResult augment_eeg(const AugmentationRequest& req) {
  check_request(req);
  if (req.mode != Mode::eeg) throw Error(ErrorKind::invalid_argument, "augment_eeg called with a non-EEG request");
  IaaftConfig cfg = req.iaaft_cfg;
  cfg.n_surrogates = req.n_surrogates;

  std::vector<std::size_t> pooled;
  if (req.union_channels) {
    pooled = detect_changepoints_union(req.channels, req.features, req.changepoint_cfg).indices;
  }
  AugmentationResult out;
  for (std::size_t c = 0; c < req.channels.size(); ++c) {
    const auto cps = req.union_channels ? pooled
                                        : detect_changepoints(req.channels[c], req.features, req.changepoint_cfg).indices;
    out.channels.push_back(augment_segments(req.channels[c], cps, cfg, c));
  }
  return out;
}

/// Peaks plus gap-fill points for one ECG channel.
inline FixedIndexSet ecg_fixed_indices(const Signal& signal, const PeakConfig& cfg) {
  return fill_gaps(detect_peaks(signal, cfg), signal.size(), cfg.max_interval);
}

inline AugmentationResult augment_ecg(const AugmentationRequest& req) {
  check_request(req);
  if (req.mode != Mode::ecg) throw Error(ErrorKind::invalid_argument, "augment_ecg called with a non-ECG request");
  if (req.channels.size() != 1) {
    throw Error(ErrorKind::invalid_argument, "ECG augmentation takes exactly one channel");
  }
  const Signal& signal = req.channels.front();
  IaaftConfig cfg = req.iaaft_cfg;
  cfg.n_surrogates = req.n_surrogates;

  ChannelResult ch;
  ch.fixed = ecg_fixed_indices(signal, req.peak_cfg);
  SurrogateSet set;
  try {
    set = iaaft_fixed_points(signal, ch.fixed, cfg);
  } catch (const Error& e) {
    throw SegmentError(e, 0, 0);
  }
  for (const auto& s : set.surrogates) {
    ch.surrogates.push_back(smooth_preserving_peaks(s, ch.fixed, req.smoothing_sigma));
  }
  ch.segments.push_back({0, signal.size(), set.degenerate, set.iterations_used, set.final_spectrum_mse});
  AugmentationResult out;
  out.channels.push_back(std::move(ch));
  return out;
}

inline AugmentationResult augment(const AugmentationRequest& req) {
  return req.mode == Mode::eeg ? augment_eeg(req) : augment_ecg(req);
}

}  // namespace cpsurr
