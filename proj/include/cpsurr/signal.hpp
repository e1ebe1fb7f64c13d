#pragma once

#include <cmath>
#include <cstddef>
#include <span>
#include <stdexcept>
#include <string>
#include <utility>
#include <vector>

namespace cpsurr {

enum class ErrorKind {
  invalid_argument,
  invalid_band,
  insufficient_length,
  empty_input,
  invalid_margin,
  length_mismatch,
  non_finite,
};

/// Base exception for every failure raised by the library.
class Error : public std::runtime_error {
 public:
  Error(ErrorKind kind, const std::string& what)
      : std::runtime_error(what), kind_(kind) {}

  ErrorKind kind() const noexcept { return kind_; }

 private:
  ErrorKind kind_;
};

/// Uniformly sampled real-valued series. Construction validates that the
/// samples are finite, fs is positive and there are at least two samples.
class Signal {
 public:
  Signal(std::vector<double> samples, double fs)
      : samples_(std::move(samples)), fs_(fs) {
    if (!(fs_ > 0.0) || !std::isfinite(fs_)) {
      throw Error(ErrorKind::invalid_argument, "sampling rate must be positive");
    }
    if (samples_.size() < 2) {
      throw Error(ErrorKind::insufficient_length,
                  "signal needs at least 2 samples, got " + std::to_string(samples_.size()));
    }
    for (std::size_t i = 0; i < samples_.size(); ++i) {
      if (!std::isfinite(samples_[i])) {
        throw Error(ErrorKind::non_finite, "non-finite sample at index " + std::to_string(i));
      }
    }
  }

  std::span<const double> samples() const noexcept { return samples_; }
  const std::vector<double>& values() const noexcept { return samples_; }
  double fs() const noexcept { return fs_; }
  std::size_t size() const noexcept { return samples_.size(); }
  double operator[](std::size_t i) const { return samples_[i]; }

 private:
  std::vector<double> samples_;
  double fs_;
};

/// A derived per-feature series. values[k] belongs to original sample
/// start_offset + k * stride. Positions where a variance-normalised quantity
/// was undefined are listed in degenerate and carry the value 0.
struct DiagnosticSequence {
  std::string feature;
  std::vector<double> values;
  std::size_t start_offset = 0;
  std::size_t stride = 1;
  std::vector<std::size_t> degenerate;

  std::size_t size() const noexcept { return values.size(); }
  std::size_t sample_index(std::size_t k) const noexcept { return start_offset + k * stride; }
};

}  // namespace cpsurr
