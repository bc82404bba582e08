#pragma once

// Tracer-gas decay analysis: instantaneous air change rates from a decaying
// concentration record, quasi-steady statistics over a chosen window, and the
// non-dimensional points used to calibrate the Richardson-fit model.

#include <algorithm>
#include <cmath>
#include <optional>
#include <string>
#include <vector>

#include "ventsim/csv.hpp"
#include "ventsim/domain.hpp"
#include "ventsim/errors.hpp"
#include "ventsim/richardson_fit.hpp"
#include "ventsim/units.hpp"
#include "ventsim/vent.hpp"

namespace ventsim {

struct ConcentrationSample {
  double timestamp = 0.0;  // s
  double concentration = 0.0;
};

struct DecayRecord {
  std::vector<ConcentrationSample> samples;
  double house_volume = 0.0;  // m^3
  std::string source;         // for messages

  void validate() const {
    if (!(house_volume > 0.0)) throw ValidationError("house_volume", "must be > 0");
    if (samples.size() < 2) throw ValidationError(source, "decay record needs at least 2 samples");
    for (std::size_t i = 0; i < samples.size(); ++i) {
      if (!(samples[i].concentration > 0.0)) {
        throw ValidationError(source, "nonpositive concentration at sample " + std::to_string(i));
      }
      if (i > 0 && !(samples[i].timestamp > samples[i - 1].timestamp)) {
        throw ValidationError(source, "timestamps must increase (sample " + std::to_string(i) + ")");
      }
    }
  }
};

struct AchPoint {
  double time = 0.0;  // timestamp, s
  double ach = 0.0;   // 1/h
};

struct AchSeries {
  double peak_time = 0.0;
  double peak_concentration = 0.0;
  std::vector<AchPoint> points;  // strictly after the peak
};

struct AchMeasurement {
  double ach_mean = 0.0;
  double ach_std = 0.0;
  double window_start = 0.0;
  double window_end = 0.0;
  double ri_v = 0.0;
  double nondim_rate = 0.0;
};

inline constexpr std::size_t kPeakFilterWidth = 10;
inline constexpr double kMinQuasiSteadyWindow = 300.0;
inline constexpr double kMaxQuasiSteadyWindow = 600.0;

/// Median of the samples in [i - w/2, i + w/2) clipped to the record.
inline std::vector<double> median_filter(const std::vector<double>& x, std::size_t width = kPeakFilterWidth) {
  std::vector<double> out(x.size());
  std::vector<double> buf;
  const std::size_t half = width / 2;
  for (std::size_t i = 0; i < x.size(); ++i) {
    const std::size_t lo = i >= half ? i - half : 0;
    const std::size_t hi = std::min(x.size(), i + (width - half));
    buf.assign(x.begin() + static_cast<std::ptrdiff_t>(lo), x.begin() + static_cast<std::ptrdiff_t>(hi));
    std::sort(buf.begin(), buf.end());
    const std::size_t m = buf.size();
    out[i] = m % 2 ? buf[m / 2] : 0.5 * (buf[m / 2 - 1] + buf[m / 2]);
  }
  return out;
}

/// Index of the peak: global maximum of the median-filtered record (first
/// on ties). The raw concentration at that index is used as c_peak.
inline std::size_t locate_peak(const DecayRecord& r) {
  std::vector<double> c;
  c.reserve(r.samples.size());
  for (const auto& s : r.samples) c.push_back(s.concentration);
  const auto f = median_filter(c);
  return static_cast<std::size_t>(std::max_element(f.begin(), f.end()) - f.begin());
}

/// Instantaneous ACH for every sample after the peak:
///   3600 * (ln c_peak - ln c(t)) / (t - t_peak).
/// The house volume cancels between the flow and the ACH conversion.
inline AchSeries decay_to_ach_series(const DecayRecord& r) {
  r.validate();
  const std::size_t ip = locate_peak(r);
  if (ip + 1 >= r.samples.size()) throw ValidationError(r.source, "no decay after the concentration peak");
  AchSeries out;
  out.peak_time = r.samples[ip].timestamp;
  out.peak_concentration = r.samples[ip].concentration;
  for (std::size_t i = ip + 1; i < r.samples.size(); ++i) {
    const auto& s = r.samples[i];
    // Log of the ratio: a common scale factor cancels before rounding.
    const double rate = std::log(out.peak_concentration / s.concentration) / (s.timestamp - out.peak_time);
    out.points.push_back({s.timestamp, rate * kSecondsPerHour});
  }
  return out;
}

struct MeanStd {
  double mean = 0.0;
  double std = 0.0;
};

/// Mean and sample standard deviation of the ACH values with time in
/// [start, start + length].
inline MeanStd quasi_steady_stats(const AchSeries& series, double window_start, double window_length) {
  if (!(window_length >= kMinQuasiSteadyWindow && window_length <= kMaxQuasiSteadyWindow)) {
    throw ValidationError("window_length", "quasi-steady window must be 300 to 600 s long");
  }
  if (series.points.empty()) throw ValidationError("window", "empty ACH series");
  const double end = window_start + window_length;
  if (window_start < series.points.front().time || end > series.points.back().time) {
    throw ValidationError("window", "window [" + csv::fmt(window_start) + ", " + csv::fmt(end) +
                                        "] is outside the decay record after the peak");
  }
  std::vector<double> v;
  for (const auto& p : series.points) {
    if (p.time >= window_start && p.time <= end) v.push_back(p.ach);
  }
  if (v.size() < 2) throw ValidationError("window", "fewer than 2 samples inside the window");
  double mean = 0.0;
  for (double x : v) mean += x;
  mean /= static_cast<double>(v.size());
  double ss = 0.0;
  for (double x : v) ss += (x - mean) * (x - mean);
  return {mean, std::sqrt(ss / static_cast<double>(v.size() - 1))};
}

/// (Ri_v, V / (A_total U)) for a measured ACH under the companion driving
/// state; the wind floor applies to both.
inline FitPoint to_fit_point(double ach_mean, double house_volume, const VentilationConfig& cfg,
                             const DrivingState& state, double h) {
  validate(state);
  if (!(house_volume > 0.0)) throw ValidationError("house_volume", "must be > 0");
  if (!(cfg.total_area > 0.0)) throw ValidationError("total_area", "must be > 0");
  const double u = std::max(state.u_wind, kWindFloor);
  const double flow = ach_mean * house_volume / kSecondsPerHour;
  return {richardson_number(state, h).value, flow / (cfg.total_area * u), 1.0};
}

/// Decay CSV: `timestamp,concentration`. Optional constant background is
/// subtracted before validation.
inline DecayRecord read_decay_csv(const std::string& path, double house_volume, double background = 0.0) {
  const auto t = csv::Table::read_file(path);
  const auto c_t = t.require_column("timestamp");
  const auto c_c = t.require_column("concentration");
  DecayRecord r;
  r.house_volume = house_volume;
  r.source = path;
  for (std::size_t row = 0; row < t.size(); ++row) {
    const double ts = t.timestamp(row, c_t);
    const double c = t.number(row, c_c) - background;
    if (!(c > 0.0)) throw InputError(path, t.line(row), "concentration must be > 0 after background removal");
    if (!r.samples.empty() && !(ts > r.samples.back().timestamp)) {
      throw InputError(path, t.line(row), "timestamps must increase");
    }
    r.samples.push_back({ts, c});
  }
  if (r.samples.size() < 2) throw InputError(path, 0, "decay record needs at least 2 samples");
  return r;
}

/// One quasi-steady window with its companion driving state.
struct MeasurementContext {
  double start = 0.0;
  double end = 0.0;
  double u_wind = 0.0;  // m/s
  double t_in = 0.0;    // K
  double t_out = 0.0;   // K
  std::string config_name;
  std::size_t line = 0;
};

/// Context CSV: `start,end,u_wind_ms,t_in_c,t_out_c,config_name`.
inline std::vector<MeasurementContext> read_context_csv(const std::string& path) {
  const auto t = csv::Table::read_file(path);
  const auto c_s = t.require_column("start");
  const auto c_e = t.require_column("end");
  const auto c_u = t.require_column("u_wind_ms");
  const auto c_ti = t.require_column("t_in_c");
  const auto c_to = t.require_column("t_out_c");
  const auto c_cfg = t.require_column("config_name");
  std::vector<MeasurementContext> out;
  for (std::size_t r = 0; r < t.size(); ++r) {
    MeasurementContext m{t.timestamp(r, c_s),
                         t.timestamp(r, c_e),
                         t.number(r, c_u),
                         celsius_to_kelvin(t.number(r, c_ti)),
                         celsius_to_kelvin(t.number(r, c_to)),
                         std::string(t.field(r, c_cfg)),
                         t.line(r)};
    if (!(m.end > m.start)) throw InputError(path, m.line, "end must be after start");
    if (m.config_name.empty()) throw InputError(path, m.line, "config_name is empty");
    out.push_back(std::move(m));
  }
  if (out.empty()) throw InputError(path, 0, "no measurement rows");
  return out;
}

struct NamedMeasurement {
  std::string config;
  AchMeasurement m;
};

/// Output: `config,ach_mean,ach_std,ri_v,nondim_rate`.
inline std::string measurements_to_csv(const std::vector<NamedMeasurement>& ms) {
  csv::Writer w({"config", "ach_mean", "ach_std", "ri_v", "nondim_rate"});
  for (const auto& x : ms) w.row(x.config, x.m.ach_mean, x.m.ach_std, x.m.ri_v, x.m.nondim_rate);
  return w.str();
}

inline std::vector<NamedMeasurement> read_measurements_csv(const std::string& path) {
  const auto t = csv::Table::read_file(path);
  const auto c_cfg = t.require_column("config");
  const auto c_mean = t.require_column("ach_mean");
  const auto c_std = t.require_column("ach_std");
  const auto c_ri = t.column("ri_v");
  const auto c_rate = t.column("nondim_rate");
  std::vector<NamedMeasurement> out;
  for (std::size_t r = 0; r < t.size(); ++r) {
    NamedMeasurement x;
    x.config = std::string(t.field(r, c_cfg));
    x.m.ach_mean = t.number(r, c_mean);
    x.m.ach_std = t.number(r, c_std);
    if (c_ri) x.m.ri_v = t.number(r, *c_ri);
    if (c_rate) x.m.nondim_rate = t.number(r, *c_rate);
    out.push_back(std::move(x));
  }
  return out;
}

}  // namespace ventsim
