#pragma once

// Command-line front end. Every command resolves its settings as
// defaults <- --config document <- explicit flags, and records the resolved
// document so that a provenance file can be fed back through --config.
//
// Exit codes: 0 ok, 2 usage or I/O, 3 malformed data, 4 engine failure.

#include <CLI11.hpp>
#include <json.hpp>

#include <algorithm>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <optional>
#include <stdexcept>
#include <string>
#include <vector>

#include "cpsurr/cpsurr.hpp"
#include "cpsurr/io/csv.hpp"
#include "cpsurr/io/report.hpp"

namespace cpsurr::cli {

using nlohmann::json;

enum ExitCode : int { exit_ok = 0, exit_usage = 2, exit_data = 3, exit_engine = 4 };

class UsageError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

class EngineError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// Every setting a command can take, with its default. A null default means
/// "unset" and is resolved per command.
inline json default_settings() {
  const ChangepointConfig cp;
  const PeakConfig pk = PeakConfig::config_a();
  const IaaftConfig ia;
  return {
      {"input", nullptr},
      {"surrogate", nullptr},
      {"fs", nullptr},
      {"seed", nullptr},
      {"channels", json::array()},
      {"n_surrogates", 1},
      {"lambda", cp.lambda},
      {"kappa", cp.kappa},
      {"sigma_mult", cp.sigma_mult},
      {"density", cp.density},
      {"min_separation", cp.min_separation},
      {"warmup", cp.warmup},
      {"window", cp.rolling.window},
      {"union_channels", false},
      {"min_distance", pk.min_distance},
      {"max_interval", pk.max_interval},
      {"prominence", nullptr},
      {"height", nullptr},
      {"point_margin", ia.point_margin},
      {"edge_fraction", ia.edge_fraction},
      {"max_iter", nullptr},
      {"mse_threshold", ia.mse_threshold},
      {"smoothing_sigma", default_smoothing_sigma},
      {"stft_window", 256},
      {"stft_hop", 64},
  };
}

/// Resolved settings plus the values that are not part of the
/// reproducibility record.
struct RunConfig {
  std::string command;
  json settings = default_settings();
  std::optional<std::string> output_dir;
  std::optional<std::string> config_path;
  bool csv_dump = false;

  ChangepointConfig changepoint_cfg() const {
    ChangepointConfig c;
    c.lambda = settings.at("lambda").get<double>();
    c.kappa = settings.at("kappa").get<std::size_t>();
    c.sigma_mult = settings.at("sigma_mult").get<double>();
    c.density = settings.at("density").get<double>();
    c.min_separation = settings.at("min_separation").get<std::size_t>();
    c.warmup = settings.at("warmup").get<std::size_t>();
    c.rolling.window = settings.at("window").get<std::size_t>();
    return c;
  }

  PeakConfig peak_cfg() const {
    PeakConfig p;
    p.min_distance = settings.at("min_distance").get<std::size_t>();
    p.max_interval = settings.at("max_interval").get<std::size_t>();
    if (!settings.at("prominence").is_null()) p.prominence = settings.at("prominence").get<double>();
    if (!settings.at("height").is_null()) p.height = settings.at("height").get<double>();
    return p;
  }

  IaaftConfig iaaft_cfg() const {
    IaaftConfig c;
    c.n_surrogates = settings.at("n_surrogates").get<std::size_t>();
    c.max_iter = settings.at("max_iter").get<std::size_t>();
    c.mse_threshold = settings.at("mse_threshold").get<double>();
    c.edge_fraction = settings.at("edge_fraction").get<double>();
    c.point_margin = settings.at("point_margin").get<std::size_t>();
    c.rng_seed = settings.at("seed").get<std::uint64_t>();
    return c;
  }
};

inline json read_json_file(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw io::IoError("cannot open config file '" + path + "'");
  try {
    return json::parse(in);
  } catch (const json::exception& e) {
    throw UsageError("config file '" + path + "' is not valid JSON: " + e.what());
  }
}

/// Overlays a config document (or the "config" object of a provenance
/// document) onto settings. Unknown keys are rejected.
inline void overlay_config(json& settings, const json& doc) {
  const json& src = doc.contains("config") && doc.at("config").is_object() ? doc.at("config") : doc;
  if (!src.is_object()) throw UsageError("config document must be a JSON object");
  for (const auto& [key, value] : src.items()) {
    if (!settings.contains(key)) throw UsageError("unknown config key '" + key + "'");
    settings[key] = value;
  }
}

inline void write_text(const std::filesystem::path& path, const std::string& text) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw io::IoError("cannot write '" + path.string() + "'");
  out << text;
}

inline std::string dump(const json& j) { return j.dump(2) + "\n"; }

struct LoadedInput {
  std::vector<std::string> names;
  std::vector<Signal> channels;
  double fs = 0.0;
};

inline LoadedInput load_signals(const std::string& path, const json& settings) {
  auto table = io::read_csv(path);
  LoadedInput out;
  if (!settings.at("fs").is_null()) {
    out.fs = settings.at("fs").get<double>();
  } else if (table.fs) {
    out.fs = *table.fs;
  } else {
    throw UsageError("sampling rate unknown: pass --fs or add a '# fs=<value>' line to '" + path + "'");
  }
  if (!(out.fs > 0.0)) throw UsageError("--fs must be positive");
  std::vector<std::size_t> pick;
  const auto& wanted = settings.at("channels");
  if (wanted.empty()) {
    for (std::size_t c = 0; c < table.names.size(); ++c) pick.push_back(c);
  } else {
    for (const auto& w : wanted) {
      const auto name = w.get<std::string>();
      const auto it = std::find(table.names.begin(), table.names.end(), name);
      if (it == table.names.end()) throw UsageError("channel '" + name + "' not found in '" + path + "'");
      pick.push_back(static_cast<std::size_t>(it - table.names.begin()));
    }
  }
  for (std::size_t c : pick) {
    out.names.push_back(table.names[c]);
    try {
      out.channels.emplace_back(std::move(table.columns[c]), out.fs);
    } catch (const Error& e) {
      throw io::DataError("channel '" + table.names[c] + "': " + e.what(), 0, table.names[c]);
    }
  }
  return out;
}

inline std::string require_input(const RunConfig& cfg) {
  if (cfg.settings.at("input").is_null()) throw UsageError("missing --input");
  return cfg.settings.at("input").get<std::string>();
}

inline std::filesystem::path require_output_dir(const RunConfig& cfg) {
  if (!cfg.output_dir) throw UsageError("missing --output-dir");
  std::filesystem::path dir(*cfg.output_dir);
  std::error_code ec;
  std::filesystem::create_directories(dir, ec);
  if (ec) throw io::IoError("cannot create output directory '" + dir.string() + "': " + ec.message());
  return dir;
}

inline void emit(const RunConfig& cfg, const json& doc, const std::string& filename, std::ostream& out) {
  const auto text = dump(doc);
  out << text;
  if (cfg.output_dir) write_text(require_output_dir(cfg) / filename, text);
}

inline int cmd_changepoints(const RunConfig& cfg, std::ostream& out) {
  const auto in = load_signals(require_input(cfg), cfg.settings);
  const auto cp = cfg.changepoint_cfg();
  json channels = json::array();
  if (cfg.settings.at("union_channels").get<bool>()) {
    auto report = io::changepoint_report(detect_changepoints_union(in.channels, default_features(), cp), in.fs, cp);
    json names = in.names;
    report["channel"] = names;
    channels.push_back(report);
  } else {
    for (std::size_t c = 0; c < in.channels.size(); ++c) {
      auto report = io::changepoint_report(detect_changepoints(in.channels[c], cp), in.fs, cp);
      report["channel"] = in.names[c];
      channels.push_back(report);
    }
  }
  emit(cfg, {{"channels", channels}}, "changepoints.json", out);
  return exit_ok;
}

inline int cmd_peaks(const RunConfig& cfg, std::ostream& out) {
  const auto in = load_signals(require_input(cfg), cfg.settings);
  const auto pk = cfg.peak_cfg();
  json channels = json::array();
  for (std::size_t c = 0; c < in.channels.size(); ++c) {
    const auto fixed = ecg_fixed_indices(in.channels[c], pk);
    auto report = io::fixed_index_report(fixed, in.channels[c].size(), in.fs, pk);
    report["channel"] = in.names[c];
    channels.push_back(report);
  }
  emit(cfg, {{"channels", channels}}, "peaks.json", out);
  return exit_ok;
}

inline std::string surrogate_filename(std::size_t a) {
  char buf[32];
  std::snprintf(buf, sizeof(buf), "surrogate_%03zu.csv", a);
  return buf;
}

inline int cmd_augment(RunConfig cfg, Mode mode, std::ostream& out) {
  auto& s = cfg.settings;
  if (s.at("seed").is_null()) throw UsageError("missing --seed: augmentation requires an explicit seed");
  if (s.at("max_iter").is_null()) s["max_iter"] = mode == Mode::eeg ? 1000 : 3000;
  const auto input = require_input(cfg);
  s["input"] = std::filesystem::absolute(input).lexically_normal().string();
  const auto dir = require_output_dir(cfg);
  const auto in = load_signals(input, s);

  AugmentationRequest req;
  req.mode = mode;
  req.channels = in.channels;
  req.changepoint_cfg = cfg.changepoint_cfg();
  req.union_channels = s.at("union_channels").get<bool>();
  req.peak_cfg = cfg.peak_cfg();
  req.iaaft_cfg = cfg.iaaft_cfg();
  req.n_surrogates = req.iaaft_cfg.n_surrogates;
  req.smoothing_sigma = s.at("smoothing_sigma").get<double>();
  if (mode == Mode::ecg && req.channels.size() != 1) {
    throw UsageError("augment-ecg takes one channel; select it with --channel");
  }

  AugmentationResult result;
  try {
    result = augment(req);
  } catch (const SegmentError& e) {
    throw EngineError(e.what());
  }

  json outputs = json::array();
  for (std::size_t a = 0; a < req.n_surrogates; ++a) {
    std::vector<std::vector<double>> columns;
    for (const auto& ch : result.channels) columns.push_back(ch.surrogates[a]);
    const auto name = surrogate_filename(a);
    io::write_csv((dir / name).string(), in.names, columns, in.fs);
    outputs.push_back(name);
  }

  json channels = json::array();
  for (std::size_t c = 0; c < result.channels.size(); ++c) {
    const auto& ch = result.channels[c];
    json segments = json::array();
    for (const auto& seg : ch.segments) {
      segments.push_back({{"start", seg.start},
                          {"length", seg.length},
                          {"copied", seg.copied},
                          {"iterations", seg.iterations},
                          {"final_mse", seg.final_mse}});
    }
    json entry{{"channel", in.names[c]}, {"segments", segments}};
    if (mode == Mode::eeg) {
      entry["changepoints"] = ch.changepoints;
    } else {
      entry["fixed"] = io::fixed_index_report(ch.fixed, in.channels[c].size(), in.fs, req.peak_cfg);
    }
    channels.push_back(entry);
  }
  const json provenance{{"command", cfg.command}, {"config", s}, {"fs", in.fs},
                        {"channels", channels},   {"outputs", outputs}};
  write_text(dir / "provenance.json", dump(provenance));
  out << dump({{"outputs", outputs}, {"provenance", "provenance.json"}});
  return exit_ok;
}

inline int cmd_metrics(const RunConfig& cfg, std::ostream& out) {
  const auto& s = cfg.settings;
  if (s.at("surrogate").is_null()) throw UsageError("missing --surrogate");
  const auto orig = load_signals(require_input(cfg), s);
  json sur_settings = s;
  sur_settings["fs"] = orig.fs;
  const auto sur = load_signals(s.at("surrogate").get<std::string>(), sur_settings);
  if (orig.channels.size() != sur.channels.size()) {
    throw io::DataError("original has " + std::to_string(orig.channels.size()) + " channels but surrogate has " +
                        std::to_string(sur.channels.size()));
  }
  const auto window = s.at("stft_window").get<std::size_t>();
  const auto hop = s.at("stft_hop").get<std::size_t>();
  json channels = json::array();
  for (std::size_t c = 0; c < orig.channels.size(); ++c) {
    if (orig.channels[c].size() != sur.channels[c].size()) {
      throw io::DataError("channel '" + orig.names[c] + "': original has " + std::to_string(orig.channels[c].size()) +
                          " samples but surrogate has " + std::to_string(sur.channels[c].size()));
    }
    const auto report = compare(orig.channels[c], sur.channels[c].samples(), window, hop);
    auto j = io::spectral_report(report);
    j["channel"] = orig.names[c];
    channels.push_back(j);
    if (cfg.csv_dump) {
      const auto dir = require_output_dir(cfg);
      const auto& name = orig.names[c];
      io::write_csv((dir / ("periodogram_" + name + ".csv")).string(), {"frequency", "original", "surrogate"},
                    {report.periodogram.frequencies, report.periodogram.original, report.periodogram.surrogate});
      std::vector<double> lo;
      std::vector<double> ho;
      std::vector<double> hs;
      for (std::size_t b = 0; b < histogram_bins; ++b) {
        lo.push_back(report.histogram.edges[b]);
        ho.push_back(static_cast<double>(report.histogram.original[b]));
        hs.push_back(static_cast<double>(report.histogram.surrogate[b]));
      }
      io::write_csv((dir / ("histogram_" + name + ".csv")).string(), {"bin_start", "original", "surrogate"},
                    {lo, ho, hs});
      const auto& sg = report.spectrogram;
      std::vector<double> t;
      std::vector<double> f;
      std::vector<double> mo;
      std::vector<double> ms;
      for (std::size_t fr = 0; fr < sg.frames; ++fr) {
        for (std::size_t b = 0; b < sg.bins; ++b) {
          t.push_back(sg.frame_times[fr]);
          f.push_back(sg.frequencies[b]);
          mo.push_back(sg.original[fr * sg.bins + b]);
          ms.push_back(sg.surrogate[fr * sg.bins + b]);
        }
      }
      io::write_csv((dir / ("spectrogram_" + name + ".csv")).string(), {"time", "frequency", "original", "surrogate"},
                    {t, f, mo, ms});
    }
  }
  emit(cfg, {{"channels", channels}}, "metrics.json", out);
  return exit_ok;
}

namespace detail {

// Registers a flag whose value, when given, lands in flags[key].
template <typename T>
CLI::Option* flag(CLI::App* app, const std::string& name, const std::string& key, json& flags,
                  const std::string& help) {
  return app->add_option_function<T>(name, [&flags, key](const T& v) { flags[key] = v; }, help);
}

inline void add_common(CLI::App* app, json& flags, RunConfig& cfg) {
  flag<std::string>(app, "--input,-i", "input", flags, "input CSV (one column per channel)");
  app->add_option("--output-dir,-o", cfg.output_dir, "directory for output files");
  flag<double>(app, "--fs", "fs", flags, "sampling rate in Hz (overrides a '# fs=' line)");
  flag<std::uint64_t>(app, "--seed", "seed", flags, "RNG seed");
  flag<std::size_t>(app, "--n-surrogates", "n_surrogates", flags, "number of surrogates");
  flag<std::vector<std::string>>(app, "--channel", "channels", flags, "channel(s) to use; default all");
  app->add_option("--config", cfg.config_path, "JSON config or provenance document");
}

inline void add_changepoint_flags(CLI::App* app, json& flags) {
  flag<double>(app, "--lambda", "lambda", flags, "forgetting factor");
  flag<std::size_t>(app, "--kappa", "kappa", flags, "lag in samples");
  flag<double>(app, "--sigma-mult", "sigma_mult", flags, "excursion threshold in standard deviations");
  flag<double>(app, "--density", "density", flags, "confirmation density");
  flag<std::size_t>(app, "--min-separation", "min_separation", flags, "minimum changepoint separation");
  flag<std::size_t>(app, "--warmup", "warmup", flags, "leading entries excluded from threshold statistics");
  flag<std::size_t>(app, "--window", "window", flags, "rolling window length");
  app->add_flag_function(
      "--union-channels", [&flags](std::int64_t) { flags["union_channels"] = true; },
      "pool changepoints across channels");
}

inline void add_peak_flags(CLI::App* app, json& flags) {
  flag<std::size_t>(app, "--min-distance", "min_distance", flags, "minimum peak distance");
  flag<std::size_t>(app, "--max-interval", "max_interval", flags, "maximum interval between fixed points");
  flag<double>(app, "--prominence", "prominence", flags, "minimum peak prominence");
  flag<double>(app, "--height", "height", flags, "minimum peak amplitude about the mean");
}

inline void add_iaaft_flags(CLI::App* app, json& flags) {
  flag<double>(app, "--edge-fraction", "edge_fraction", flags, "fraction of each segment pinned at both ends");
  flag<std::size_t>(app, "--max-iter", "max_iter", flags, "iteration cap");
  flag<double>(app, "--mse-threshold", "mse_threshold", flags, "stop when the spectrum MSE changes less");
}

}  // namespace detail

inline int run(int argc, const char* const* argv, std::ostream& out, std::ostream& err) {
  CLI::App app{"Changepoint- and peak-informed iAAFT surrogates for nonstationary signals", "cpsurr"};
  app.require_subcommand(1);
  json flags = json::object();
  RunConfig cfg;

  auto* changepoints = app.add_subcommand("changepoints", "detect changepoints per channel");
  detail::add_common(changepoints, flags, cfg);
  detail::add_changepoint_flags(changepoints, flags);

  auto* peaks = app.add_subcommand("peaks", "detect peaks and gap-fill points per channel");
  detail::add_common(peaks, flags, cfg);
  detail::add_peak_flags(peaks, flags);

  auto* eeg = app.add_subcommand("augment-eeg", "segment-wise fixed-edges surrogates");
  detail::add_common(eeg, flags, cfg);
  detail::add_changepoint_flags(eeg, flags);
  detail::add_iaaft_flags(eeg, flags);

  auto* ecg = app.add_subcommand("augment-ecg", "peak-preserving fixed-points surrogates");
  detail::add_common(ecg, flags, cfg);
  detail::add_peak_flags(ecg, flags);
  detail::add_iaaft_flags(ecg, flags);
  detail::flag<std::size_t>(ecg, "--point-margin", "point_margin", flags, "samples pinned either side of a point");
  detail::flag<double>(ecg, "--smoothing-sigma", "smoothing_sigma", flags, "Gaussian smoothing sigma");

  auto* metrics = app.add_subcommand("metrics", "compare an original and a surrogate file");
  detail::add_common(metrics, flags, cfg);
  detail::flag<std::string>(metrics, "--surrogate", "surrogate", flags, "surrogate CSV");
  detail::flag<std::size_t>(metrics, "--stft-window", "stft_window", flags, "STFT window length");
  detail::flag<std::size_t>(metrics, "--stft-hop", "stft_hop", flags, "STFT hop");
  metrics->add_flag("--csv-dump", cfg.csv_dump, "also write each panel as CSV into --output-dir");

  try {
    app.parse(argc, argv);
  } catch (const CLI::CallForHelp& e) {
    return app.exit(e, out, err);
  } catch (const CLI::CallForAllHelp& e) {
    return app.exit(e, out, err);
  } catch (const CLI::ParseError& e) {
    app.exit(e, out, err);
    return exit_usage;
  }

  try {
    cfg.command = app.get_subcommands().front()->get_name();
    if (cfg.config_path) overlay_config(cfg.settings, read_json_file(*cfg.config_path));
    overlay_config(cfg.settings, flags);
    try {
      if (cfg.command == "changepoints") return cmd_changepoints(cfg, out);
      if (cfg.command == "peaks") return cmd_peaks(cfg, out);
      if (cfg.command == "augment-eeg") return cmd_augment(cfg, Mode::eeg, out);
      if (cfg.command == "augment-ecg") return cmd_augment(cfg, Mode::ecg, out);
      if (cfg.command == "metrics") return cmd_metrics(cfg, out);
    } catch (const json::exception& e) {
      throw UsageError(std::string("invalid setting: ") + e.what());
    }
  } catch (const UsageError& e) {
    err << "error: " << e.what() << "\n";
    return exit_usage;
  } catch (const io::IoError& e) {
    err << "error: " << e.what() << "\n";
    return exit_usage;
  } catch (const io::DataError& e) {
    err << "data error: " << e.what() << "\n";
    return exit_data;
  } catch (const EngineError& e) {
    err << "engine error: " << e.what() << "\n";
    return exit_engine;
  } catch (const Error& e) {
    // remaining library errors stem from invalid settings or unusable data
    const bool usage = e.kind() == ErrorKind::invalid_argument || e.kind() == ErrorKind::invalid_band;
    err << "error: " << e.what() << "\n";
    return usage ? exit_usage : exit_data;
  }
  return exit_usage;
}

inline int run(const std::vector<std::string>& args, std::ostream& out, std::ostream& err) {
  std::vector<const char*> argv{"cpsurr"};
  for (const auto& a : args) argv.push_back(a.c_str());
  return run(static_cast<int>(argv.size()), argv.data(), out, err);
}

}  // namespace cpsurr::cli
