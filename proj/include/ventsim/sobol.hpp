#pragma once

// First-order Sobol indices by the Saltelli pick-and-freeze design, and their
// per-minute evaluation over daily analysis windows.

#include <algorithm>
#include <array>
#include <cfloat>
#include <cmath>
#include <cstdio>
#include <numeric>
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "ventsim/btm.hpp"
#include "ventsim/csv.hpp"
#include "ventsim/errors.hpp"
#include "ventsim/parameters.hpp"
#include "ventsim/sampling.hpp"
#include "ventsim/vent.hpp"
#include "ventsim/weather.hpp"

namespace ventsim {

inline constexpr std::size_t kMinSobolBase = 64;
inline constexpr double kRawIndexLow = -0.05;
inline constexpr double kRawIndexHigh = 1.05;

struct SobolIndices {
  std::vector<double> raw;      // clamped to [-0.05, 1.05]
  std::vector<double> clamped;  // clamped to [0, 1]
  bool zero_variance = false;
  double variance = 0.0;
};

/// Unit-cube Saltelli design: base points of A and B, row-major, `dims` wide.
struct SaltelliDesign {
  std::size_t dims = 0;
  std::size_t base = 0;
  std::vector<double> a;
  std::vector<double> b;

  std::span<const double> row_a(std::size_t j) const { return {a.data() + j * dims, dims}; }
  std::span<const double> row_b(std::size_t j) const { return {b.data() + j * dims, dims}; }

  /// Point `j` of evaluation block `block`: 0 is A, 1 is B, 2 + i is A with
  /// column i taken from B.
  void point(std::size_t block, std::size_t j, std::span<double> out) const {
    const auto ra = row_a(j);
    if (block == 1) {
      const auto rb = row_b(j);
      std::copy(rb.begin(), rb.end(), out.begin());
      return;
    }
    std::copy(ra.begin(), ra.end(), out.begin());
    if (block >= 2) out[block - 2] = b[j * dims + (block - 2)];
  }

  std::size_t evaluations() const noexcept { return (dims + 2) * base; }
};

inline SaltelliDesign make_saltelli_design(std::size_t dims, std::size_t base, std::uint64_t seed) {
  if (base < kMinSobolBase) {
    throw ValidationError("sobol_base", "base sample count must be >= " + std::to_string(kMinSobolBase));
  }
  if (dims == 0) throw ValidationError("dims", "must be >= 1");
  SaltelliDesign d{dims, base, std::vector<double>(dims * base), std::vector<double>(dims * base)};
  UnitRng rng(seed);
  // Rows alternate A then B so a larger base extends rather than reshuffles.
  for (std::size_t j = 0; j < base; ++j) {
    for (std::size_t i = 0; i < dims; ++i) d.a[j * dims + i] = rng();
    for (std::size_t i = 0; i < dims; ++i) d.b[j * dims + i] = rng();
  }
  return d;
}

/// Indices from the outputs of one scalar quantity: f_ab[i] holds the
/// outputs on A with column i from B.
inline SobolIndices sobol_from_outputs(std::span<const double> f_a, std::span<const double> f_b,
                                       const std::vector<std::vector<double>>& f_ab) {
  const std::size_t n = f_a.size();
  SobolIndices s;
  s.raw.assign(f_ab.size(), 0.0);
  s.clamped.assign(f_ab.size(), 0.0);
  double mean = 0.0;
  for (std::size_t j = 0; j < n; ++j) mean += f_a[j] + f_b[j];
  mean /= static_cast<double>(2 * n);
  double var = 0.0;
  for (std::size_t j = 0; j < n; ++j) {
    var += (f_a[j] - mean) * (f_a[j] - mean) + (f_b[j] - mean) * (f_b[j] - mean);
  }
  var /= static_cast<double>(2 * n);
  s.variance = var;
  if (var <= 1e-20 * mean * mean || var <= DBL_MIN) {
    s.zero_variance = true;
    return s;
  }
  for (std::size_t i = 0; i < f_ab.size(); ++i) {
    double vi = 0.0;
    for (std::size_t j = 0; j < n; ++j) vi += f_b[j] * (f_ab[i][j] - f_a[j]);
    vi /= static_cast<double>(n);
    const double si = vi / var;
    s.raw[i] = std::clamp(si, kRawIndexLow, kRawIndexHigh);
    s.clamped[i] = std::clamp(si, 0.0, 1.0);
  }
  return s;
}

/// Multi-output evaluation: `eval(point)` returns a fixed-length vector of
/// outputs; the result holds one SobolIndices per output component.
/// Evaluations run in parallel; the reduction is ordered by design index.
template <class Eval>
std::vector<SobolIndices> sobol_first_order_multi(const SaltelliDesign& d, Eval&& eval, unsigned threads = 0) {
  const std::size_t blocks = d.dims + 2;
  std::vector<std::vector<double>> outputs(blocks * d.base);
  parallel_for(blocks * d.base, threads, [&](std::size_t job) {
    std::vector<double> x(d.dims);
    d.point(job / d.base, job % d.base, x);
    outputs[job] = eval(std::span<const double>(x));
  });
  const std::size_t m = outputs.front().size();
  for (const auto& o : outputs) {
    if (o.size() != m) throw ValidationError("evaluator", "output length differs between evaluations");
  }
  std::vector<SobolIndices> result;
  result.reserve(m);
  std::vector<double> fa(d.base), fb(d.base);
  std::vector<std::vector<double>> fab(d.dims, std::vector<double>(d.base));
  for (std::size_t k = 0; k < m; ++k) {
    for (std::size_t j = 0; j < d.base; ++j) {
      fa[j] = outputs[j][k];
      fb[j] = outputs[d.base + j][k];
      for (std::size_t i = 0; i < d.dims; ++i) fab[i][j] = outputs[(2 + i) * d.base + j][k];
    }
    result.push_back(sobol_from_outputs(fa, fb, fab));
  }
  return result;
}

/// Scalar evaluator over the unit cube of dimension `dims`.
template <class Eval>
SobolIndices sobol_first_order_unit(std::size_t dims, std::size_t base, std::uint64_t seed, Eval&& eval,
                                    unsigned threads = 0) {
  const auto d = make_saltelli_design(dims, base, seed);
  auto r = sobol_first_order_multi(
      d, [&](std::span<const double> x) { return std::vector<double>{eval(x)}; }, threads);
  return std::move(r.front());
}

inline ParameterSample unit_to_sample(const ParameterRanges& ranges, std::span<const double> x) {
  std::array<double, kParameterCount> u{};
  std::copy(x.begin(), x.end(), u.begin());
  return ranges.map_unit(u);
}

/// Scalar evaluator of a ParameterSample, design of size plan.sobol_base over
/// plan.ranges, seeded by plan.seed.
template <class Eval>
SobolIndices sobol_first_order(Eval&& eval, const SamplingPlan& plan, unsigned threads = 0) {
  plan.ranges.validate();
  return sobol_first_order_unit(
      kParameterCount, plan.sobol_base, plan.seed,
      [&](std::span<const double> x) { return eval(unit_to_sample(plan.ranges, x)); }, threads);
}

/// Half-open daily time-of-day interval [start, end) in seconds after
/// midnight; end < start wraps past midnight.
struct AnalysisWindow {
  std::string name;
  double start = 0.0;
  double end = 0.0;

  bool contains(double time_of_day) const noexcept {
    if (start <= end) return time_of_day >= start && time_of_day < end;
    return time_of_day >= start || time_of_day < end;
  }
};

inline AnalysisWindow day_window() { return {"day", 9 * kSecondsPerHour, 15 * kSecondsPerHour}; }
inline AnalysisWindow night_window() { return {"night", 21 * kSecondsPerHour, 3 * kSecondsPerHour}; }

namespace detail {

inline std::optional<double> parse_clock(std::string_view s) {
  int h = 0, m = 0;
  char extra = 0;
  const std::string str(s);
  int n = std::sscanf(str.c_str(), "%d:%d%c", &h, &m, &extra);
  if (n != 2) {
    m = 0;
    n = std::sscanf(str.c_str(), "%d%c", &h, &extra);
    if (n != 1) return std::nullopt;
  }
  if (h < 0 || h > 24 || m < 0 || m > 59 || (h == 24 && m != 0)) return std::nullopt;
  return h * kSecondsPerHour + m * 60.0;
}

}  // namespace detail

/// `day`, `night`, or `H[:MM]..H[:MM]`.
inline AnalysisWindow parse_analysis_window(std::string_view s) {
  if (s == "day") return day_window();
  if (s == "night") return night_window();
  const auto sep = s.find("..");
  if (sep != std::string_view::npos) {
    const auto a = detail::parse_clock(s.substr(0, sep));
    const auto b = detail::parse_clock(s.substr(sep + 2));
    if (a && b && *a != *b) {
      return {std::string(s), std::fmod(*a, kSecondsPerDay), std::fmod(*b, kSecondsPerDay)};
    }
  }
  throw ValidationError("window", "expected day, night or H[:MM]..H[:MM], got '" + std::string(s) + "'");
}

struct BoxStats {
  double min = 0.0;
  double q25 = 0.0;
  double median = 0.0;
  double q75 = 0.0;
  double max = 0.0;
};

inline BoxStats box_stats(std::vector<double> v) {
  if (v.empty()) throw ValidationError("values", "no values to summarise");
  std::sort(v.begin(), v.end());
  return {v.front(), sorted_percentile(v, 0.25), sorted_percentile(v, 0.5), sorted_percentile(v, 0.75), v.back()};
}

struct SobolReportRow {
  std::string window;
  std::string model;
  std::string quantity;  // t_air or ach
  Parameter parameter;
  BoxStats stats;
};

/// Per-minute indices behind the summary rows.
struct SobolStepIndices {
  std::string window;
  std::string model;
  std::string quantity;
  double time = 0.0;  // s since simulation start
  SobolIndices indices;
};

struct SobolReport {
  std::vector<SobolReportRow> rows;
  std::vector<SobolStepIndices> steps;
  std::vector<double> output_time;  // of the underlying runs
};

struct SensitivityOptions {
  IntegrationOptions integration;
  unsigned threads = 0;
};

/// Output step indices whose time of day falls inside the window.
inline std::vector<std::size_t> steps_in_window(const std::vector<double>& time, double start_timestamp,
                                                const AnalysisWindow& w) {
  std::vector<std::size_t> out;
  for (std::size_t k = 0; k < time.size(); ++k) {
    double tod = std::fmod(start_timestamp + time[k], kSecondsPerDay);
    if (tod < 0.0) tod += kSecondsPerDay;
    if (w.contains(tod)) out.push_back(k);
  }
  return out;
}

/// Saltelli design over the seven parameters, one full simulation per design
/// point and model; indices at every output step inside each window are
/// summarised as box statistics of the [0, 1]-clamped values.
inline SobolReport windowed_sensitivity(const ScenarioConfig& scenario_in, const WindowedDistributions& windows,
                                        const SamplingPlan& plan, const std::vector<VentModelKind>& models,
                                        const std::vector<AnalysisWindow>& analysis,
                                        const std::optional<RichardsonCoefficients>& coeffs = std::nullopt,
                                        const SensitivityOptions& opt = {}) {
  if (models.empty()) throw ValidationError("models", "no ventilation model selected");
  if (analysis.empty()) throw ValidationError("window", "no analysis window selected");
  plan.ranges.validate();
  const ScenarioConfig scenario = resolve_floor_temperature(scenario_in, windows.mean_outdoor_temp());
  IntegrationOptions iopt = opt.integration;
  if (iopt.horizon <= 0.0) iopt.horizon = windows.horizon();
  const auto n_steps = static_cast<std::size_t>(std::llround(iopt.horizon / iopt.output_interval)) + 1;

  SobolReport report;
  report.output_time.resize(n_steps);
  for (std::size_t k = 0; k < n_steps; ++k) report.output_time[k] = static_cast<double>(k) * iopt.output_interval;

  std::vector<std::vector<std::size_t>> selected;
  for (const auto& w : analysis) {
    selected.push_back(steps_in_window(report.output_time, windows.start_timestamp, w));
    if (selected.back().empty()) {
      throw ValidationError("window", "analysis window '" + w.name + "' lies outside the simulation horizon");
    }
  }

  const auto design = make_saltelli_design(kParameterCount, plan.sobol_base, plan.seed);
  for (auto kind : models) {
    const VentilationModel vent(kind, scenario.ventilation, scenario.geometry.reference_height, coeffs);
    // Output layout: t_air at every step, then ach at every step.
    auto indices = sobol_first_order_multi(
        design,
        [&](std::span<const double> x) {
          const auto sample = unit_to_sample(plan.ranges, x);
          const auto trace = synthesize_trace(windows, sample.p_temp, sample.p_rad, sample.p_wind);
          const auto res = integrate_with(scenario, trace, sample, vent, iopt);
          std::vector<double> out(res.t_air);
          out.insert(out.end(), res.ach.begin(), res.ach.end());
          return out;
        },
        opt.threads);
    const std::string model(to_string(kind));
    for (std::size_t w = 0; w < analysis.size(); ++w) {
      for (std::size_t q = 0; q < 2; ++q) {
        const std::string quantity = q == 0 ? "t_air" : "ach";
        std::array<std::vector<double>, kParameterCount> per_param;
        for (std::size_t k : selected[w]) {
          const auto& s = indices[q * n_steps + k];
          for (std::size_t i = 0; i < kParameterCount; ++i) per_param[i].push_back(s.clamped[i]);
          report.steps.push_back({analysis[w].name, model, quantity, report.output_time[k], s});
        }
        for (std::size_t i = 0; i < kParameterCount; ++i) {
          report.rows.push_back({analysis[w].name, model, quantity, kAllParameters[i], box_stats(per_param[i])});
        }
      }
    }
  }
  return report;
}

/// `window,model,quantity,parameter,min,q25,median,q75,max`.
inline std::string sobol_report_to_csv(const SobolReport& r) {
  csv::Writer w({"window", "model", "quantity", "parameter", "min", "q25", "median", "q75", "max"});
  for (const auto& row : r.rows) {
    w.row(row.window, row.model, row.quantity, to_string(row.parameter), row.stats.min, row.stats.q25,
          row.stats.median, row.stats.q75, row.stats.max);
  }
  return w.str();
}

/// Raw per-minute indices: `window,model,quantity,time_s,zero_variance,<param>...`.
inline std::string sobol_steps_to_csv(const SobolReport& r) {
  std::vector<std::string> header{"window", "model", "quantity", "time_s", "zero_variance"};
  for (auto p : kAllParameters) header.emplace_back(to_string(p));
  csv::Writer w(header);
  for (const auto& s : r.steps) {
    std::vector<std::string> cells{s.window, s.model, s.quantity, csv::fmt(s.time),
                                   s.indices.zero_variance ? "1" : "0"};
    for (double v : s.indices.raw) cells.push_back(csv::fmt(v));
    w.cells(cells);
  }
  return w.str();
}

inline std::vector<SobolReportRow> read_sobol_report_csv(const std::string& path) {
  const auto t = csv::Table::read_file(path);
  const std::array<std::size_t, 9> c{t.require_column("window"), t.require_column("model"),
                                     t.require_column("quantity"), t.require_column("parameter"),
                                     t.require_column("min"),      t.require_column("q25"),
                                     t.require_column("median"),   t.require_column("q75"),
                                     t.require_column("max")};
  std::vector<SobolReportRow> rows;
  for (std::size_t r = 0; r < t.size(); ++r) {
    SobolReportRow row;
    row.window = std::string(t.field(r, c[0]));
    row.model = std::string(t.field(r, c[1]));
    row.quantity = std::string(t.field(r, c[2]));
    try {
      row.parameter = parse_parameter(t.field(r, c[3]));
    } catch (const ValidationError& e) {
      throw InputError(path, t.line(r), e.what());
    }
    row.stats = {t.number(r, c[4]), t.number(r, c[5]), t.number(r, c[6]), t.number(r, c[7]), t.number(r, c[8])};
    const auto& s = row.stats;
    if (!(s.min <= s.q25 && s.q25 <= s.median && s.median <= s.q75 && s.q75 <= s.max)) {
      throw InputError(path, t.line(r), "summary statistics are not ordered");
    }
    rows.push_back(std::move(row));
  }
  return rows;
}

}  // namespace ventsim
