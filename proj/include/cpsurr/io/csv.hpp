#pragma once

// Headered multichannel CSV: optional '#' comment lines (a "# fs=<value>"
// line sets the sampling rate), one header row of channel names, then one
// row per sample. Values are written in shortest round-trip form.

#include <charconv>
#include <cmath>
#include <fstream>
#include <optional>
#include <sstream>
#include <stdexcept>
#include <string>
#include <string_view>
#include <system_error>
#include <vector>

#include "cpsurr/signal.hpp"

namespace cpsurr::io {

/// File could not be opened, read or written.
class IoError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// Contents are malformed. row is the 1-based data row (0 when the problem
/// is not tied to a row); column is the channel name when known.
class DataError : public Error {
 public:
  DataError(const std::string& what, std::size_t row = 0, std::string column = {})
      : Error(ErrorKind::invalid_argument, what), row_(row), column_(std::move(column)) {}

  std::size_t row() const noexcept { return row_; }
  const std::string& column() const noexcept { return column_; }

 private:
  std::size_t row_;
  std::string column_;
};

struct Table {
  std::vector<std::string> names;
  std::vector<std::vector<double>> columns;
  std::optional<double> fs;

  std::size_t rows() const noexcept { return columns.empty() ? 0 : columns.front().size(); }
};

namespace detail {

inline std::string_view trim(std::string_view s) {
  const auto first = s.find_first_not_of(" \t\r");
  if (first == std::string_view::npos) return {};
  const auto last = s.find_last_not_of(" \t\r");
  return s.substr(first, last - first + 1);
}

inline std::vector<std::string_view> split(std::string_view line) {
  std::vector<std::string_view> cells;
  std::size_t start = 0;
  while (true) {
    const auto comma = line.find(',', start);
    cells.push_back(trim(line.substr(start, comma == std::string_view::npos ? std::string_view::npos : comma - start)));
    if (comma == std::string_view::npos) break;
    start = comma + 1;
  }
  return cells;
}

inline std::optional<double> parse_double(std::string_view s) {
  if (!s.empty() && s.front() == '+') s.remove_prefix(1);
  double v = 0.0;
  const auto [ptr, ec] = std::from_chars(s.data(), s.data() + s.size(), v);
  if (ec != std::errc() || ptr != s.data() + s.size() || s.empty()) return std::nullopt;
  return v;
}

// "# fs=256", "#fs = 256.0"
inline std::optional<double> parse_fs_comment(std::string_view line) {
  auto body = trim(line.substr(1));
  if (body.substr(0, 2) != "fs") return std::nullopt;
  body = trim(body.substr(2));
  if (body.empty() || body.front() != '=') return std::nullopt;
  return parse_double(trim(body.substr(1)));
}

}  // namespace detail

inline Table parse_csv(std::istream& in) {
  Table t;
  std::string line;
  bool have_header = false;
  std::size_t row = 0;
  while (std::getline(in, line)) {
    const auto view = detail::trim(line);
    if (view.empty()) continue;
    if (view.front() == '#') {
      if (auto fs = detail::parse_fs_comment(view)) {
        if (!(*fs > 0.0) || !std::isfinite(*fs)) throw DataError("invalid fs comment: " + std::string(view));
        t.fs = *fs;
      }
      continue;
    }
    const auto cells = detail::split(view);
    if (!have_header) {
      for (auto c : cells) t.names.emplace_back(c);
      t.columns.resize(t.names.size());
      have_header = true;
      continue;
    }
    ++row;
    if (cells.size() != t.names.size()) {
      throw DataError("row " + std::to_string(row) + " has " + std::to_string(cells.size()) + " cells, expected " +
                          std::to_string(t.names.size()),
                      row);
    }
    for (std::size_t c = 0; c < cells.size(); ++c) {
      const auto v = detail::parse_double(cells[c]);
      if (!v || !std::isfinite(*v)) {
        throw DataError("row " + std::to_string(row) + ", column '" + t.names[c] + "': invalid value '" +
                            std::string(cells[c]) + "'",
                        row, t.names[c]);
      }
      t.columns[c].push_back(*v);
    }
  }
  if (!have_header) throw DataError("no header row found");
  if (row == 0) throw DataError("no data rows found");
  return t;
}

inline Table read_csv(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw IoError("cannot open input file '" + path + "'");
  return parse_csv(in);
}

/// Shortest decimal form that parses back to exactly the same double.
inline std::string format_double(double v) {
  char buf[32];
  const auto [ptr, ec] = std::to_chars(buf, buf + sizeof(buf), v);
  if (ec != std::errc()) throw DataError("cannot format value");
  return std::string(buf, ptr);
}

inline void write_csv(std::ostream& out, const std::vector<std::string>& names,
                      const std::vector<std::vector<double>>& columns, std::optional<double> fs = std::nullopt) {
  if (fs) out << "# fs=" << format_double(*fs) << '\n';
  for (std::size_t c = 0; c < names.size(); ++c) out << (c ? "," : "") << names[c];
  out << '\n';
  const std::size_t rows = columns.empty() ? 0 : columns.front().size();
  for (std::size_t r = 0; r < rows; ++r) {
    for (std::size_t c = 0; c < columns.size(); ++c) out << (c ? "," : "") << format_double(columns[c][r]);
    out << '\n';
  }
}

inline void write_csv(const std::string& path, const std::vector<std::string>& names,
                      const std::vector<std::vector<double>>& columns, std::optional<double> fs = std::nullopt) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw IoError("cannot open output file '" + path + "'");
  write_csv(out, names, columns, fs);
  if (!out) throw IoError("failed writing '" + path + "'");
}

}  // namespace cpsurr::io
