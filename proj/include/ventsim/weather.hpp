#pragma once

// Weather ingestion and input-uncertainty characterisation: smoothing of raw
// station data, per-window distribution fits, and synthesis of sampled input
// traces for the thermal model by inverse transform sampling.

#include <algorithm>
#include <cmath>
#include <numeric>
#include <numbers>
#include <span>
#include <string>
#include <vector>

#include "ventsim/csv.hpp"
#include "ventsim/distributions.hpp"
#include "ventsim/errors.hpp"
#include "ventsim/units.hpp"

namespace ventsim {

struct WeatherSample {
  double timestamp = 0.0;     // s since epoch
  double outdoor_temp = 0.0;  // K
  double wind_speed = 0.0;    // m/s
  double wind_dir = 0.0;      // deg, kept for provenance only
  double solar = 0.0;         // W/m^2

  bool operator==(const WeatherSample&) const = default;
};

struct WeatherSeries {
  std::vector<WeatherSample> samples;
  double nominal_period = 0.0;  // s, median sample spacing
};

inline WeatherSeries make_weather_series(std::vector<WeatherSample> samples) {
  if (samples.empty()) throw ValidationError("weather", "empty series");
  for (std::size_t i = 0; i < samples.size(); ++i) {
    const auto& s = samples[i];
    const std::string at = "weather[" + std::to_string(i) + "]";
    if (i > 0 && !(s.timestamp > samples[i - 1].timestamp)) {
      throw ValidationError(at + ".timestamp", "timestamps must be strictly increasing");
    }
    if (!(s.wind_speed >= 0.0)) throw ValidationError(at + ".wind_speed", "must be >= 0");
    if (!(s.solar >= 0.0)) throw ValidationError(at + ".solar", "must be >= 0");
    require_plausible_temperature(s.outdoor_temp, at + ".outdoor_temp");
  }
  WeatherSeries out;
  if (samples.size() > 1) {
    std::vector<double> gaps(samples.size() - 1);
    for (std::size_t i = 1; i < samples.size(); ++i) gaps[i - 1] = samples[i].timestamp - samples[i - 1].timestamp;
    auto mid = gaps.begin() + static_cast<std::ptrdiff_t>(gaps.size() / 2);
    std::nth_element(gaps.begin(), mid, gaps.end());
    out.nominal_period = *mid;
  }
  out.samples = std::move(samples);
  return out;
}

struct RejectedRow {
  std::size_t line = 0;
  std::string reason;
};

struct WeatherLoadResult {
  WeatherSeries series;
  std::vector<RejectedRow> rejected;
};

/// Load `timestamp,temp_c,wind_speed_ms,wind_dir_deg,solar_wm2`. Rows with a
/// missing or unparseable field are dropped and reported by line number.
inline WeatherLoadResult read_weather_csv(const std::string& path) {
  const auto table = csv::Table::read_file(path);
  const auto c_time = table.require_column("timestamp");
  const auto c_temp = table.require_column("temp_c");
  const auto c_wind = table.require_column("wind_speed_ms");
  const auto c_dir = table.require_column("wind_dir_deg");
  const auto c_solar = table.require_column("solar_wm2");

  WeatherLoadResult result;
  std::vector<WeatherSample> samples;
  samples.reserve(table.size());
  for (std::size_t r = 0; r < table.size(); ++r) {
    const auto t = csv::parse_timestamp(table.field(r, c_time));
    const auto temp = csv::try_parse_double(table.field(r, c_temp));
    const auto wind = csv::try_parse_double(table.field(r, c_wind));
    const auto dir = csv::try_parse_double(table.field(r, c_dir));
    const auto solar = csv::try_parse_double(table.field(r, c_solar));
    if (!t || !temp || !wind || !dir || !solar) {
      result.rejected.push_back({table.line(r), "missing or malformed field"});
      continue;
    }
    if (!samples.empty() && *t <= samples.back().timestamp) {
      throw InputError(path, table.line(r), "timestamps must be strictly increasing");
    }
    samples.push_back({*t, celsius_to_kelvin(*temp), *wind, *dir, *solar});
  }
  if (samples.empty()) throw InputError(path, 0, "no valid weather rows");
  try {
    result.series = make_weather_series(std::move(samples));
  } catch (const ValidationError& e) {
    throw InputError(path, 0, e.what());
  }
  return result;
}

/// Centered moving average over [t - w/2, t + w/2). Near the ends the window
/// is truncated to the samples that exist. Wind direction is averaged as a
/// unit vector.
inline WeatherSeries moving_average(const WeatherSeries& series, double window_s = 30.0) {
  const auto& in = series.samples;
  if (in.empty()) throw ValidationError("weather", "empty series");
  if (window_s < series.nominal_period) {
    throw ValidationError("window", "moving-average window shorter than the sampling period");
  }
  const double half = 0.5 * window_s;
  const std::size_t n = in.size();
  WeatherSeries out;
  out.nominal_period = series.nominal_period;
  out.samples.resize(n);

  std::size_t lo = 0;
  std::size_t hi = 0;  // window is [lo, hi)
  constexpr double deg = std::numbers::pi / 180.0;
  for (std::size_t i = 0; i < n; ++i) {
    const double t = in[i].timestamp;
    while (hi < n && in[hi].timestamp < t + half) ++hi;
    while (in[lo].timestamp < t - half) ++lo;
    double a_temp = 0, a_wind = 0, a_solar = 0, a_sin = 0, a_cos = 0;
    for (std::size_t j = lo; j < hi; ++j) {
      a_temp += in[j].outdoor_temp;
      a_wind += in[j].wind_speed;
      a_solar += in[j].solar;
      a_sin += std::sin(in[j].wind_dir * deg);
      a_cos += std::cos(in[j].wind_dir * deg);
    }
    const double count = static_cast<double>(hi - lo);
    WeatherSample& o = out.samples[i];
    o.timestamp = t;
    o.outdoor_temp = a_temp / count;
    o.wind_speed = std::max(0.0, a_wind / count);
    o.solar = std::max(0.0, a_solar / count);
    double dir = std::atan2(a_sin, a_cos) / deg;
    if (dir < 0.0) dir += 360.0;
    o.wind_dir = dir;
  }
  return out;
}

/// Power-law profile: speed * (to / from)^exponent.
inline double correct_wind_height(double speed, double from_height, double to_height, double exponent = 0.25) {
  if (!(from_height > 0.0)) throw ValidationError("from_height", "must be > 0");
  if (!(to_height > 0.0)) throw ValidationError("to_height", "must be > 0");
  return speed * std::pow(to_height / from_height, exponent);
}

inline WeatherSeries correct_wind_height(WeatherSeries series, double from_height, double to_height,
                                         double exponent = 0.25) {
  for (auto& s : series.samples) s.wind_speed = correct_wind_height(s.wind_speed, from_height, to_height, exponent);
  return series;
}

struct WindowDistributions {
  TruncatedNormal temperature;  // K
  Uniform solar;                // W/m^2
  Weibull wind;                 // m/s

  bool operator==(const WindowDistributions&) const = default;
};

struct WindowedDistributions {
  double start_timestamp = 0.0;
  double window_length = 1800.0;
  std::vector<WindowDistributions> windows;

  double horizon() const noexcept { return window_length * static_cast<double>(windows.size()); }

  double mean_outdoor_temp() const noexcept {
    double s = 0.0;
    for (const auto& w : windows) s += w.temperature.mean;
    return windows.empty() ? 0.0 : s / static_cast<double>(windows.size());
  }

  bool operator==(const WindowedDistributions&) const = default;
};

/// Anemometer stall threshold; zero readings in a window with some wind are
/// raised to this before the Weibull fit (log 0 is undefined).
inline constexpr double kWindFitFloor = 0.05;

/// Fit one distribution per window of `window_length` seconds, tiling the
/// series from its first timestamp. A trailing partial window is dropped.
inline WindowedDistributions fit_window_distributions(const WeatherSeries& series, double window_length = 1800.0) {
  const auto& s = series.samples;
  if (s.empty()) throw ValidationError("weather", "empty series");
  if (!(window_length > 0.0)) throw ValidationError("window_length", "must be > 0");
  const double t0 = s.front().timestamp;
  const double span = s.back().timestamp - t0 + series.nominal_period;
  const auto count = static_cast<std::size_t>(std::floor(span / window_length + 1e-9));
  if (count == 0) throw ValidationError("weather", "series spans less than one window");

  WindowedDistributions out;
  out.start_timestamp = t0;
  out.window_length = window_length;
  out.windows.reserve(count);
  std::size_t i = 0;
  std::vector<double> temps, winds;
  for (std::size_t k = 0; k < count; ++k) {
    const double end = t0 + static_cast<double>(k + 1) * window_length;
    temps.clear();
    winds.clear();
    double smin = std::numeric_limits<double>::infinity();
    double smax = -std::numeric_limits<double>::infinity();
    while (i < s.size() && s[i].timestamp < end) {
      temps.push_back(s[i].outdoor_temp);
      winds.push_back(s[i].wind_speed);
      smin = std::min(smin, s[i].solar);
      smax = std::max(smax, s[i].solar);
      ++i;
    }
    const std::string at = "window[" + std::to_string(k) + "]";
    if (temps.size() < 2) throw ValidationError(at, "fewer than 2 samples");

    const double n = static_cast<double>(temps.size());
    const double mean = std::accumulate(temps.begin(), temps.end(), 0.0) / n;
    double ss = 0.0;
    for (double x : temps) ss += (x - mean) * (x - mean);

    if (std::all_of(winds.begin(), winds.end(), [](double w) { return w == 0.0; })) {
      throw ValidationError(at, "all wind samples are zero; cannot fit a Weibull distribution");
    }
    for (double& w : winds) w = std::max(w, kWindFitFloor);

    WindowDistributions d;
    d.temperature = TruncatedNormal{mean, std::sqrt(ss / (n - 1.0))};
    d.solar = Uniform{smin, smax};
    d.wind = fit_weibull_mle(winds);
    out.windows.push_back(d);
  }
  return out;
}

/// Piecewise-constant weather inputs over the simulated horizon.
struct WeatherInputTrace {
  struct Value {
    double outdoor_temp = 0.0;  // K
    double solar = 0.0;         // W/m^2
    double wind_speed = 0.0;    // m/s
  };

  double start_timestamp = 0.0;
  double window_length = 1800.0;
  std::vector<Value> windows;

  double horizon() const noexcept { return window_length * static_cast<double>(windows.size()); }

  /// Value at simulation time t (seconds from the trace start). Times outside
  /// [0, horizon) wrap periodically, which is how spin-up before t = 0 is fed.
  const Value& at(double t) const noexcept {
    const auto n = static_cast<long long>(windows.size());
    auto k = static_cast<long long>(std::floor(t / window_length));
    k %= n;
    if (k < 0) k += n;
    return windows[static_cast<std::size_t>(k)];
  }
};

/// One quantile per channel, the same probability for every window.
inline WeatherInputTrace synthesize_trace(const WindowedDistributions& dists, double p_temp, double p_rad,
                                          double p_wind) {
  if (dists.windows.empty()) throw ValidationError("windows", "no windows");
  WeatherInputTrace trace;
  trace.start_timestamp = dists.start_timestamp;
  trace.window_length = dists.window_length;
  trace.windows.reserve(dists.windows.size());
  for (const auto& w : dists.windows) {
    trace.windows.push_back({inverse_transform_sample(w.temperature, p_temp),
                             std::max(0.0, inverse_transform_sample(w.solar, p_rad)),
                             std::max(0.0, inverse_transform_sample(w.wind, p_wind))});
  }
  return trace;
}

/// Trace with the same constant values everywhere; handy for tests and
/// steady-state studies.
inline WeatherInputTrace constant_trace(double outdoor_temp_k, double solar, double wind_speed,
                                        double horizon_s, double window_length = 1800.0) {
  WeatherInputTrace trace;
  trace.window_length = window_length;
  const auto n = static_cast<std::size_t>(std::llround(horizon_s / window_length));
  trace.windows.assign(std::max<std::size_t>(n, 1), {outdoor_temp_k, solar, wind_speed});
  return trace;
}

inline std::string windows_to_csv(const WindowedDistributions& d) {
  csv::Writer w({"window_start", "window_length_s", "temp_mean_c", "temp_std_c", "solar_min_wm2",
                 "solar_max_wm2", "wind_scale_ms", "wind_shape"});
  for (std::size_t k = 0; k < d.windows.size(); ++k) {
    const auto& x = d.windows[k];
    w.row(csv::format_timestamp(d.start_timestamp + static_cast<double>(k) * d.window_length), d.window_length,
          kelvin_to_celsius(x.temperature.mean), x.temperature.stddev, x.solar.min, x.solar.max, x.wind.scale,
          x.wind.shape);
  }
  return w.str();
}

inline bool is_windows_csv(const csv::Table& t) { return t.column("window_start").has_value(); }

inline WindowedDistributions windows_from_table(const csv::Table& t) {
  const auto c_start = t.require_column("window_start");
  const auto c_len = t.require_column("window_length_s");
  const auto c_mean = t.require_column("temp_mean_c");
  const auto c_std = t.require_column("temp_std_c");
  const auto c_smin = t.require_column("solar_min_wm2");
  const auto c_smax = t.require_column("solar_max_wm2");
  const auto c_scale = t.require_column("wind_scale_ms");
  const auto c_shape = t.require_column("wind_shape");
  if (t.size() == 0) throw InputError(t.path(), 0, "no windows");
  WindowedDistributions d;
  for (std::size_t r = 0; r < t.size(); ++r) {
    const double start = t.timestamp(r, c_start);
    const double len = t.number(r, c_len);
    if (r == 0) {
      d.start_timestamp = start;
      d.window_length = len;
    } else if (std::abs(start - (d.start_timestamp + static_cast<double>(r) * d.window_length)) > 1e-6 ||
               len != d.window_length) {
      throw InputError(t.path(), t.line(r), "windows must be contiguous and of equal length");
    }
    WindowDistributions w;
    w.temperature = {celsius_to_kelvin(t.number(r, c_mean)), t.number(r, c_std)};
    w.solar = {t.number(r, c_smin), t.number(r, c_smax)};
    w.wind = {t.number(r, c_scale), t.number(r, c_shape)};
    if (w.temperature.stddev < 0.0 || w.solar.min > w.solar.max || w.solar.min < 0.0 || !(w.wind.scale > 0.0) ||
        !(w.wind.shape > 0.0) || !is_plausible_temperature(w.temperature.mean)) {
      throw InputError(t.path(), t.line(r), "invalid window distribution parameters");
    }
    d.windows.push_back(w);
  }
  return d;
}

}  // namespace ventsim
