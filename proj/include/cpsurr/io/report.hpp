#pragma once

// JSON documents for changepoint sets, fixed index sets and spectral
// reports. Keys are lowercase snake_case.

#include <json.hpp>

#include <string>

#include "cpsurr/changepoint.hpp"
#include "cpsurr/io/csv.hpp"
#include "cpsurr/metrics.hpp"
#include "cpsurr/peaks.hpp"

namespace cpsurr::io {

using nlohmann::json;

inline std::string to_string(FixedKind k) { return k == FixedKind::detected_peak ? "detected_peak" : "gap_fill"; }

inline FixedKind fixed_kind_from_string(const std::string& s) {
  if (s == "detected_peak") return FixedKind::detected_peak;
  if (s == "gap_fill") return FixedKind::gap_fill;
  throw DataError("unknown fixed index kind '" + s + "'");
}

inline json to_json(const ChangepointConfig& c) {
  return {{"lambda", c.lambda},           {"kappa", c.kappa},       {"sigma_mult", c.sigma_mult},
          {"density", c.density},         {"min_separation", c.min_separation},
          {"warmup", c.warmup},           {"window", c.rolling.window}, {"stride", c.rolling.stride}};
}

inline json to_json(const PeakConfig& c) {
  json j{{"min_distance", c.min_distance}, {"max_interval", c.max_interval}};
  j["prominence"] = c.prominence ? json(*c.prominence) : json(nullptr);
  j["height"] = c.height ? json(*c.height) : json(nullptr);
  return j;
}

inline json to_json(const IaaftConfig& c) {
  return {{"n_surrogates", c.n_surrogates}, {"max_iter", c.max_iter},         {"mse_threshold", c.mse_threshold},
          {"edge_fraction", c.edge_fraction}, {"point_margin", c.point_margin}, {"rng_seed", c.rng_seed}};
}

inline json changepoint_report(const ChangepointSet& set, double fs, const ChangepointConfig& cfg) {
  json per_feature = json::object();
  for (const auto& [name, idx] : set.per_feature) per_feature[name] = idx;
  return {{"fs", fs}, {"indices", set.indices}, {"per_feature", per_feature}, {"config", to_json(cfg)}};
}

inline json fixed_index_report(const FixedIndexSet& set, std::size_t n, double fs, const PeakConfig& cfg) {
  json points = json::array();
  for (std::size_t i = 0; i < set.size(); ++i) {
    points.push_back({{"index", set.indices[i]}, {"kind", to_string(set.kinds[i])}});
  }
  return {{"fs", fs}, {"n", n}, {"indices", set.indices}, {"points", points}, {"config", to_json(cfg)}};
}

inline FixedIndexSet fixed_index_set_from_json(const json& j) {
  FixedIndexSet out;
  for (const auto& p : j.at("points")) {
    out.indices.push_back(p.at("index").get<std::size_t>());
    out.kinds.push_back(fixed_kind_from_string(p.at("kind").get<std::string>()));
  }
  return out;
}

inline json spectral_report(const SpectralReport& r) {
  const auto& sg = r.spectrogram;
  return {
      {"fs", r.fs},
      {"spectrum_rel_l2", r.spectrum_rel_l2},
      {"histogram_distance", r.histogram_distance},
      {"spectrogram_rel_l2", r.spectrogram_rel_l2},
      {"periodogram",
       {{"frequencies", r.periodogram.frequencies},
        {"original", r.periodogram.original},
        {"surrogate", r.periodogram.surrogate}}},
      {"histogram",
       {{"edges", r.histogram.edges}, {"original", r.histogram.original}, {"surrogate", r.histogram.surrogate}}},
      {"spectrogram",
       {{"window", sg.window},
        {"hop", sg.hop},
        {"frames", sg.frames},
        {"bins", sg.bins},
        {"frame_times", sg.frame_times},
        {"frequencies", sg.frequencies},
        {"original", sg.original},
        {"surrogate", sg.surrogate}}},
  };
}

}  // namespace cpsurr::io
