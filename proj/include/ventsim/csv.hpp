#pragma once

// Minimal CSV support for the tool's own file formats: comma separated, no
// quoting, header row required, '#' lines ignored.

#include <charconv>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <optional>
#include <sstream>
#include <string>
#include <string_view>
#include <system_error>
#include <vector>

#include "ventsim/errors.hpp"

namespace ventsim::csv {

inline std::string_view trim(std::string_view s) noexcept {
  while (!s.empty() && (s.front() == ' ' || s.front() == '\t')) s.remove_prefix(1);
  while (!s.empty() && (s.back() == ' ' || s.back() == '\t' || s.back() == '\r')) s.remove_suffix(1);
  return s;
}

inline std::vector<std::string> split(std::string_view line) {
  std::vector<std::string> out;
  std::size_t start = 0;
  while (true) {
    const auto pos = line.find(',', start);
    out.emplace_back(trim(line.substr(start, pos == std::string_view::npos ? pos : pos - start)));
    if (pos == std::string_view::npos) break;
    start = pos + 1;
  }
  return out;
}

inline std::optional<double> try_parse_double(std::string_view s) noexcept {
  s = trim(s);
  if (s.empty()) return std::nullopt;
  if (s.front() == '+') s.remove_prefix(1);
  double v = 0.0;
  const auto [ptr, ec] = std::from_chars(s.data(), s.data() + s.size(), v);
  if (ec != std::errc() || ptr != s.data() + s.size()) return std::nullopt;
  return v;
}

/// Shortest decimal form that round-trips exactly.
inline std::string fmt(double v) {
  if (std::isnan(v)) return "nan";
  if (std::isinf(v)) return v > 0 ? "inf" : "-inf";
  char buf[64];
  const auto [ptr, ec] = std::to_chars(buf, buf + sizeof buf, v);
  return std::string(buf, ptr);
}

/// Seconds since the Unix epoch from either a plain number or ISO-8601
/// `YYYY-MM-DD[T ]HH:MM[:SS[.fff]][Z]`. Times without a zone are taken as-is
/// (treated as UTC), so time-of-day arithmetic follows the file's clock.
inline std::optional<double> parse_timestamp(std::string_view s) {
  s = trim(s);
  if (auto v = try_parse_double(s)) return v;
  int y = 0, mo = 0, d = 0, h = 0, mi = 0;
  double sec = 0.0;
  std::string buf(s);
  if (!buf.empty() && (buf.back() == 'Z' || buf.back() == 'z')) buf.pop_back();
  char sep = 0;
  int n = std::sscanf(buf.c_str(), "%4d-%2d-%2d%c%2d:%2d:%lf", &y, &mo, &d, &sep, &h, &mi, &sec);
  if (n == 6) {
    sec = 0.0;
  } else if (n != 7) {
    return std::nullopt;
  }
  if (sep != 'T' && sep != 't' && sep != ' ') return std::nullopt;
  using namespace std::chrono;
  const year_month_day ymd{year{y}, month{static_cast<unsigned>(mo)}, day{static_cast<unsigned>(d)}};
  if (!ymd.ok() || h < 0 || h > 23 || mi < 0 || mi > 59 || sec < 0.0 || sec >= 61.0) return std::nullopt;
  const auto days = sys_days{ymd}.time_since_epoch().count();
  return static_cast<double>(days) * 86400.0 + h * 3600.0 + mi * 60.0 + sec;
}

inline std::string format_timestamp(double epoch_s) {
  using namespace std::chrono;
  const double whole = std::floor(epoch_s);
  const auto day_count = static_cast<long long>(std::floor(whole / 86400.0));
  const year_month_day ymd{sys_days{days{day_count}}};
  long long rem = static_cast<long long>(whole) - day_count * 86400LL;
  const double frac = epoch_s - whole;
  char buf[48];
  std::snprintf(buf, sizeof buf, "%04d-%02u-%02uT%02lld:%02lld:%02lld", static_cast<int>(ymd.year()),
                static_cast<unsigned>(ymd.month()), static_cast<unsigned>(ymd.day()), rem / 3600,
                (rem / 60) % 60, rem % 60);
  std::string out = buf;
  if (frac > 0.0) {
    std::snprintf(buf, sizeof buf, "%.3f", frac);
    out += (buf + 1);
  }
  return out;
}

/// A parsed CSV table with 1-based source line numbers retained per row.
class Table {
 public:
  static Table read_file(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw InputError(path, 0, "cannot open file");
    return read(in, path);
  }

  static Table read(std::istream& in, const std::string& path) {
    Table t;
    t.path_ = path;
    std::string line;
    std::size_t lineno = 0;
    while (std::getline(in, line)) {
      ++lineno;
      const auto trimmed = trim(line);
      if (trimmed.empty() || trimmed.front() == '#') continue;
      auto fields = split(trimmed);
      if (t.header_.empty()) {
        t.header_ = std::move(fields);
        continue;
      }
      t.rows_.push_back({lineno, std::move(fields)});
    }
    if (t.header_.empty()) throw InputError(path, 0, "missing header row");
    return t;
  }

  const std::string& path() const noexcept { return path_; }
  const std::vector<std::string>& header() const noexcept { return header_; }
  std::size_t size() const noexcept { return rows_.size(); }

  std::optional<std::size_t> column(std::string_view name) const noexcept {
    for (std::size_t i = 0; i < header_.size(); ++i) {
      if (header_[i] == name) return i;
    }
    return std::nullopt;
  }

  std::size_t require_column(std::string_view name) const {
    auto c = column(name);
    if (!c) throw InputError(path_, 0, "missing column '" + std::string(name) + "'");
    return *c;
  }

  std::size_t line(std::size_t row) const noexcept { return rows_[row].line; }

  /// Raw field; empty when the row is short.
  std::string_view field(std::size_t row, std::size_t col) const noexcept {
    const auto& f = rows_[row].fields;
    return col < f.size() ? std::string_view(f[col]) : std::string_view();
  }

  double number(std::size_t row, std::size_t col) const {
    const auto f = field(row, col);
    auto v = try_parse_double(f);
    if (!v) {
      throw InputError(path_, line(row),
                       "column '" + header_[col] + "': expected a number, got '" + std::string(f) + "'");
    }
    return *v;
  }

  double timestamp(std::size_t row, std::size_t col) const {
    const auto f = field(row, col);
    auto v = parse_timestamp(f);
    if (!v) {
      throw InputError(path_, line(row),
                       "column '" + header_[col] + "': expected a timestamp, got '" + std::string(f) + "'");
    }
    return *v;
  }

 private:
  struct Row {
    std::size_t line;
    std::vector<std::string> fields;
  };

  std::string path_;
  std::vector<std::string> header_;
  std::vector<Row> rows_;
};

/// Builds CSV text row by row.
class Writer {
 public:
  explicit Writer(std::initializer_list<std::string_view> header) { row_strings(header); }
  explicit Writer(const std::vector<std::string>& header) { cells(header); }

  Writer& cells(const std::vector<std::string>& values) {
    bool first = true;
    for (const auto& v : values) append(first, std::string_view(v));
    out_ << '\n';
    return *this;
  }

  template <class... Ts>
  Writer& row(const Ts&... cells) {
    bool first = true;
    ((append(first, cells)), ...);
    out_ << '\n';
    return *this;
  }

  std::string str() const { return out_.str(); }

 private:
  void row_strings(std::initializer_list<std::string_view> cells) {
    bool first = true;
    for (auto c : cells) {
      if (!first) out_ << ',';
      out_ << c;
      first = false;
    }
    out_ << '\n';
  }

  void sep(bool& first) {
    if (!first) out_ << ',';
    first = false;
  }
  void append(bool& first, double v) {
    sep(first);
    out_ << fmt(v);
  }
  void append(bool& first, std::string_view s) {
    sep(first);
    out_ << s;
  }
  void append(bool& first, const std::string& s) { append(first, std::string_view(s)); }
  void append(bool& first, const char* s) { append(first, std::string_view(s)); }
  template <std::integral I>
  void append(bool& first, I v) {
    sep(first);
    out_ << v;
  }

  std::ostringstream out_;
};

}  // namespace ventsim::csv
