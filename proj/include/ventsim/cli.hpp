#pragma once

// Command-line front end. run_cli() takes the arguments after the program
// name and returns the process exit code:
//   0 success, 1 invalid input or arguments, 2 solver failure.

#include <cmath>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <optional>
#include <string>
#include <vector>

#include <CLI11.hpp>

#include "ventsim/btm.hpp"
#include "ventsim/csv.hpp"
#include "ventsim/domain.hpp"
#include "ventsim/errors.hpp"
#include "ventsim/manifest.hpp"
#include "ventsim/richardson_fit.hpp"
#include "ventsim/sampling.hpp"
#include "ventsim/sobol.hpp"
#include "ventsim/svg_plot.hpp"
#include "ventsim/tracer.hpp"
#include "ventsim/uq.hpp"
#include "ventsim/vent.hpp"
#include "ventsim/weather.hpp"

namespace ventsim::cli {

namespace fs = std::filesystem;

inline constexpr double kWeatherWindow = 1800.0;    // s
inline constexpr double kSmoothingWindow = 30.0;    // s

/// Output directory guard: every file goes through here, so nothing is
/// written outside `--out`.
class OutDir {
 public:
  explicit OutDir(const std::string& dir) : dir_(dir) {
    if (dir.empty()) throw ValidationError("out", "an output directory is required");
    std::error_code ec;
    fs::create_directories(dir_, ec);
    if (ec) throw InputError(dir, 0, "cannot create output directory: " + ec.message());
  }

  void write(const std::string& name, const std::string& content) {
    const fs::path rel(name);
    if (rel.is_absolute() || rel.lexically_normal().string().starts_with("..")) {
      throw ValidationError("out", "refusing to write outside the output directory: " + name);
    }
    const fs::path p = dir_ / rel;
    if (p.has_parent_path()) fs::create_directories(p.parent_path());
    std::ofstream f(p, std::ios::binary | std::ios::trunc);
    if (!f) throw InputError(p.string(), 0, "cannot write file");
    f << content;
    if (!f) throw InputError(p.string(), 0, "write failed");
    written_.push_back(rel.generic_string());
  }

  const fs::path& path() const noexcept { return dir_; }
  const std::vector<std::string>& written() const noexcept { return written_; }

 private:
  fs::path dir_;
  std::vector<std::string> written_;
};

inline void finish(OutDir& out, RunManifest m) {
  m.out_dir = out.path().string();
  m.outputs = out.written();
  m.outputs.push_back("manifest.json");
  out.write("manifest.json", manifest_to_json(m).dump(2) + "\n");
}

struct WeatherInput {
  WindowedDistributions windows;
  std::size_t rejected = 0;
};

/// A windows CSV is taken as is; a raw series is smoothed when sampled
/// faster than every 30 s, corrected to the reference height when the
/// scenario names an anemometer height, then fitted per 30 min window.
inline WeatherInput load_weather(const std::string& path, const ScenarioConfig* scenario) {
  const auto table = csv::Table::read_file(path);
  if (is_windows_csv(table)) return {windows_from_table(table), 0};
  auto loaded = read_weather_csv(path);
  for (const auto& r : loaded.rejected) {
    std::cerr << "ventsim: warning: " << path << ":" << r.line << ": " << r.reason << ", row skipped\n";
  }
  WeatherSeries series = std::move(loaded.series);
  try {
    if (series.nominal_period < kSmoothingWindow) series = moving_average(series, kSmoothingWindow);
    if (scenario && scenario->wind_correction) {
      series = correct_wind_height(std::move(series), scenario->wind_correction->measurement_height,
                                   scenario->geometry.reference_height, scenario->wind_correction->exponent);
    }
    return {fit_window_distributions(series, kWeatherWindow), loaded.rejected.size()};
  } catch (const ValidationError& e) {
    throw InputError(path, 0, e.what());
  }
}

inline ScenarioConfig select_configuration(ScenarioConfig s, const std::string& name) {
  if (name.empty()) return s;
  s.ventilation = s.configuration(name);
  s.hash = fnv1a64(scenario_to_json(s).dump() + "|active=" + name);
  return s;
}

struct CommonRun {
  std::string scenario;
  std::string weather;
  std::string models = "ensemble";
  std::string coeffs;
  std::string config;
  std::size_t samples = 1000;
  std::optional<std::uint64_t> seed;
  std::string out;
  double spinup_hours = 6.0;
  double dt = 10.0;
  unsigned threads = 0;
};

inline IntegrationOptions integration_options(const CommonRun& c) {
  if (!(c.spinup_hours >= 0.0)) throw ValidationError("spinup-hours", "must be >= 0");
  if (!(c.dt > 0.0)) throw ValidationError("dt", "must be > 0");
  IntegrationOptions o;
  o.dt = c.dt;
  o.spinup = c.spinup_hours * kSecondsPerHour;
  return o;
}

inline std::optional<RichardsonCoefficients> load_coeffs(const CommonRun& c, const std::vector<VentModelKind>& models,
                                                         RunManifest& m) {
  const bool needs = std::find(models.begin(), models.end(), VentModelKind::RichardsonFit) != models.end();
  if (c.coeffs.empty()) {
    if (needs) throw ValidationError("coeffs", "the richardson model needs --coeffs");
    return std::nullopt;
  }
  m.add_input("coeffs", c.coeffs);
  m.coeffs_source = c.coeffs;
  return read_coefficients_csv(c.coeffs);
}

inline std::string samples_to_csv(const std::vector<ParameterSample>& samples) {
  std::vector<std::string> header{"sample"};
  for (auto p : kAllParameters) header.emplace_back(to_string(p));
  csv::Writer w(header);
  for (std::size_t i = 0; i < samples.size(); ++i) {
    std::vector<std::string> cells{std::to_string(i)};
    for (auto p : kAllParameters) cells.push_back(csv::fmt(samples[i][p]));
    w.cells(cells);
  }
  return w.str();
}

inline std::string sample_results_to_csv(const MonteCarloResult& r) {
  csv::Writer w({"sample", "model", "time_s", "t_air_k", "ach"});
  for (std::size_t i = 0; i < r.samples.size(); ++i) {
    for (const auto& s : r.series) {
      if (!s.ok[i]) continue;
      for (std::size_t k = 0; k < s.steps; ++k) {
        w.row(i, to_string(s.model), r.report.time[k], s.t_air_at(i, k), s.ach_at(i, k));
      }
    }
  }
  return w.str();
}

inline int cmd_simulate(const CommonRun& c, bool emit_samples, const std::vector<std::string>& args) {
  if (!c.seed) throw ValidationError("seed", "--seed is required");
  RunManifest m;
  m.command = "simulate";
  m.args = args;
  m.seed = c.seed;
  m.samples = c.samples;
  m.models = c.models;
  m.add_input("scenario", c.scenario);
  m.add_input("weather", c.weather);
  const auto scenario = select_configuration(load_scenario(c.scenario), c.config);
  const auto weather = load_weather(c.weather, &scenario);
  const auto models = parse_model_selection(c.models);
  const auto coeffs = load_coeffs(c, models, m);
  SamplingPlan plan;
  plan.n_samples = c.samples;
  plan.seed = *c.seed;
  plan.ranges = scenario.ranges;
  for (auto p : plan.ranges.overridden()) {
    std::cerr << "ventsim: note: range of " << to_string(p) << " overridden by the scenario\n";
  }
  MonteCarloOptions opt;
  opt.integration = integration_options(c);
  opt.threads = c.threads;

  OutDir out(c.out);
  const auto result = run_monte_carlo(scenario, weather.windows, plan, models, coeffs, opt);
  out.write("uq_report.csv", uq_report_to_csv(result.report));
  out.write("windows.csv", windows_to_csv(weather.windows));
  out.write("samples.csv", samples_to_csv(result.samples));
  if (!result.failures.empty()) {
    csv::Writer w({"sample", "model", "time_s", "message"});
    for (const auto& f : result.failures) w.row(f.sample, to_string(f.model), f.time, "\"" + f.message + "\"");
    out.write("failures.csv", w.str());
    std::cerr << "ventsim: warning: " << result.failures.size() << " runs aborted, see failures.csv\n";
  }
  if (emit_samples) out.write("sample_results.csv", sample_results_to_csv(result));
  finish(out, std::move(m));
  return 0;
}

inline int cmd_fit_weather(const std::string& weather, const std::string& scenario_path, double window_minutes,
                           const std::string& out_dir, const std::vector<std::string>& args) {
  RunManifest m;
  m.command = "fit-weather";
  m.args = args;
  m.add_input("weather", weather);
  std::optional<ScenarioConfig> scenario;
  if (!scenario_path.empty()) {
    m.add_input("scenario", scenario_path);
    scenario = load_scenario(scenario_path);
  }
  auto loaded = read_weather_csv(weather);
  for (const auto& r : loaded.rejected) {
    std::cerr << "ventsim: warning: " << weather << ":" << r.line << ": " << r.reason << ", row skipped\n";
  }
  WindowedDistributions d;
  try {
    auto series = std::move(loaded.series);
    if (series.nominal_period < kSmoothingWindow) series = moving_average(series, kSmoothingWindow);
    if (scenario && scenario->wind_correction) {
      series = correct_wind_height(std::move(series), scenario->wind_correction->measurement_height,
                                   scenario->geometry.reference_height, scenario->wind_correction->exponent);
    }
    d = fit_window_distributions(series, window_minutes * 60.0);
  } catch (const ValidationError& e) {
    throw InputError(weather, 0, e.what());
  }
  OutDir out(out_dir);
  out.write("windows.csv", windows_to_csv(d));
  finish(out, std::move(m));
  return 0;
}

inline int cmd_fit_richardson(const std::string& points_path, const std::string& out_dir,
                              const std::vector<std::string>& args) {
  RunManifest m;
  m.command = "fit-richardson";
  m.args = args;
  m.add_input("points", points_path);
  const auto pts = read_fit_points_csv(points_path);
  const auto fit = fit_richardson_coeffs(pts);
  OutDir out(out_dir);
  out.write("coeffs.csv", coefficients_to_csv(fit, pts.size()));
  finish(out, std::move(m));
  return 0;
}

inline int cmd_ach_decay(const std::vector<std::string>& decay_paths, const std::string& context_path,
                         const std::string& scenario_path, double background, const std::string& out_dir,
                         const std::vector<std::string>& args) {
  RunManifest m;
  m.command = "ach-decay";
  m.args = args;
  m.add_input("scenario", scenario_path);
  m.add_input("context", context_path);
  for (const auto& d : decay_paths) m.add_input("decay", d);
  const auto scenario = load_scenario(scenario_path);
  const double volume = scenario.geometry.air_volume;
  std::vector<std::pair<std::string, AchSeries>> series;
  for (const auto& p : decay_paths) {
    try {
      series.emplace_back(p, decay_to_ach_series(read_decay_csv(p, volume, background)));
    } catch (const ValidationError& e) {
      throw InputError(p, 0, e.what());
    }
  }
  const auto contexts = read_context_csv(context_path);
  std::vector<NamedMeasurement> results;
  for (const auto& ctx : contexts) {
    const AchSeries* match = nullptr;
    for (const auto& [path, s] : series) {
      if (!s.points.empty() && s.points.front().time <= ctx.start && ctx.end <= s.points.back().time) {
        match = &s;
        break;
      }
    }
    if (!match) {
      throw InputError(context_path, ctx.line, "no decay record covers the window after its peak");
    }
    NamedMeasurement nm;
    nm.config = ctx.config_name;
    try {
      const auto& cfg = scenario.configuration(ctx.config_name);
      const auto stats = quasi_steady_stats(*match, ctx.start, ctx.end - ctx.start);
      const auto pt = to_fit_point(stats.mean, volume, cfg, {ctx.t_in, ctx.t_out, ctx.u_wind},
                                   scenario.geometry.reference_height);
      nm.m = {stats.mean, stats.std, ctx.start, ctx.end, pt.ri_v, pt.nondim_rate};
    } catch (const ValidationError& e) {
      throw InputError(context_path, ctx.line, e.what());
    }
    results.push_back(std::move(nm));
  }
  OutDir out(out_dir);
  out.write("measurements.csv", measurements_to_csv(results));
  finish(out, std::move(m));
  return 0;
}

/// `linear:a1,a2,...`: Y = sum a_i u_i over the unit cube of the first k
/// parameters, an analytic check of the estimator.
inline std::vector<double> parse_linear_evaluator(const std::string& spec) {
  const std::string prefix = "linear:";
  if (!spec.starts_with(prefix)) throw ValidationError("evaluator", "expected linear:a1,a2,...");
  std::vector<double> a;
  for (const auto& tok : csv::split(std::string_view(spec).substr(prefix.size()))) {
    const auto v = csv::try_parse_double(tok);
    if (!v) throw ValidationError("evaluator", "bad coefficient '" + tok + "'");
    a.push_back(*v);
  }
  if (a.empty() || a.size() > kParameterCount) {
    throw ValidationError("evaluator", "expected 1 to 7 coefficients");
  }
  return a;
}

inline int cmd_sobol(const CommonRun& c, const std::vector<std::string>& window_specs, const std::string& evaluator,
                     bool emit_steps, const std::vector<std::string>& args) {
  if (!c.seed) throw ValidationError("seed", "--seed is required");
  RunManifest m;
  m.command = "sobol";
  m.args = args;
  m.seed = c.seed;
  m.samples = c.samples;
  SamplingPlan plan;
  plan.seed = *c.seed;
  plan.sobol_base = c.samples;

  SobolReport report;
  if (!evaluator.empty()) {
    const auto a = parse_linear_evaluator(evaluator);
    const auto s = sobol_first_order_unit(
        a.size(), plan.sobol_base, plan.seed,
        [&](std::span<const double> x) {
          double y = 0.0;
          for (std::size_t i = 0; i < a.size(); ++i) y += a[i] * x[i];
          return y;
        },
        c.threads);
    for (std::size_t i = 0; i < a.size(); ++i) {
      const double v = s.clamped[i];
      report.rows.push_back({"all", "linear", "y", kAllParameters[i], {v, v, v, v, v}});
    }
    report.steps.push_back({"all", "linear", "y", 0.0, s});
    m.models = evaluator;
  } else {
    m.models = c.models;
    m.add_input("scenario", c.scenario);
    m.add_input("weather", c.weather);
    const auto scenario = select_configuration(load_scenario(c.scenario), c.config);
    const auto weather = load_weather(c.weather, &scenario);
    const auto models = parse_model_selection(c.models);
    const auto coeffs = load_coeffs(c, models, m);
    plan.ranges = scenario.ranges;
    std::vector<AnalysisWindow> windows;
    for (const auto& w : window_specs.empty() ? std::vector<std::string>{"day", "night"} : window_specs) {
      windows.push_back(parse_analysis_window(w));
    }
    SensitivityOptions opt;
    opt.integration = integration_options(c);
    opt.threads = c.threads;
    report = windowed_sensitivity(scenario, weather.windows, plan, models, windows, coeffs, opt);
  }
  OutDir out(c.out);
  out.write("sobol.csv", sobol_report_to_csv(report));
  if (emit_steps || !evaluator.empty()) out.write("sobol_steps.csv", sobol_steps_to_csv(report));
  finish(out, std::move(m));
  return 0;
}

/// Time of day (s) for `HH:MM[:SS]` or a full timestamp.
inline double parse_report_start(const std::string& s) {
  if (const auto t = csv::parse_timestamp(s)) return std::fmod(*t, kSecondsPerDay);
  int h = 0, mi = 0, sec = 0;
  char extra = 0;
  const int n = std::sscanf(s.c_str(), "%d:%d:%d%c", &h, &mi, &sec, &extra);
  if ((n == 2 || n == 3) && h >= 0 && h < 24 && mi >= 0 && mi < 60 && sec >= 0 && sec < 60) {
    return h * kSecondsPerHour + mi * 60.0 + sec;
  }
  throw ValidationError("report-start", "expected HH:MM[:SS] or a timestamp, got '" + s + "'");
}

inline int cmd_plot_band(const std::string& report_path, const std::string& quantity, const std::string& out_dir,
                         const std::vector<std::string>& args) {
  RunManifest m;
  m.command = "plot band";
  m.args = args;
  m.add_input("report", report_path);
  if (quantity != "all" && quantity != "t_air" && quantity != "ach") {
    throw ValidationError("quantity", "expected t_air, ach or all");
  }
  const auto r = read_uq_report_csv(report_path);
  OutDir out(out_dir);
  for (const std::string q : {"t_air", "ach"}) {
    if (quantity == "all" || quantity == q) out.write("band_" + q + ".svg", svg::band_plot(r, q));
  }
  finish(out, std::move(m));
  return 0;
}

inline int cmd_plot_scatter(const std::string& report_path, const std::string& measurements_path,
                            const std::string& context_path, const std::string& model,
                            const std::string& report_start, const std::string& out_dir,
                            const std::vector<std::string>& args) {
  RunManifest m;
  m.command = "plot scatter";
  m.args = args;
  m.add_input("report", report_path);
  m.add_input("measurements", measurements_path);
  m.add_input("context", context_path);
  const auto r = read_uq_report_csv(report_path);
  const auto ms = read_measurements_csv(measurements_path);
  const auto ctx = read_context_csv(context_path);
  if (ms.size() != ctx.size()) {
    throw InputError(measurements_path, 0, "row count differs from the context file");
  }
  const ModelBands* bands = nullptr;
  if (model == "ensemble" && r.ensemble) bands = &*r.ensemble;
  for (const auto& mb : r.models) {
    if (mb.model == model) bands = &mb;
  }
  if (!bands) throw ValidationError("model", "model '" + model + "' is not in the report");
  const double t0 = parse_report_start(report_start);
  const double period = r.time.back() - r.time.front();

  std::vector<svg::ScatterPoint> pts;
  for (std::size_t i = 0; i < ms.size(); ++i) {
    // Window position within the report, by time of day.
    auto rel = [&](double ts) {
      double x = std::fmod(ts, kSecondsPerDay) - t0;
      if (x < 0.0) x += kSecondsPerDay;
      return x;
    };
    const double a = rel(ctx[i].start);
    const double b = a + (ctx[i].end - ctx[i].start);
    double mean = 0.0, lo = std::numeric_limits<double>::infinity(), hi = -lo;
    std::size_t n = 0;
    for (std::size_t k = 0; k < r.time.size(); ++k) {
      if (r.time[k] >= a && r.time[k] <= b) {
        mean += bands->ach.mean[k];
        lo = std::min(lo, bands->ach.ci_low[k]);
        hi = std::max(hi, bands->ach.ci_high[k]);
        ++n;
      }
    }
    if (n == 0) {
      throw InputError(context_path, ctx[i].line,
                       "measurement window is outside the report period of " + csv::fmt(period) + " s");
    }
    pts.push_back({ms[i].config, ms[i].m.ach_mean, ms[i].m.ach_std, mean / static_cast<double>(n), lo, hi});
  }
  OutDir out(out_dir);
  out.write("ach_scatter.svg", svg::ach_scatter(pts, "ACH: " + model));
  finish(out, std::move(m));
  return 0;
}

inline int cmd_plot_sobol(const std::string& report_path, const std::string& model, const std::string& quantity,
                          const std::string& out_dir, const std::vector<std::string>& args) {
  RunManifest m;
  m.command = "plot sobol";
  m.args = args;
  m.add_input("report", report_path);
  const auto rows = read_sobol_report_csv(report_path);
  std::vector<std::pair<std::string, std::string>> combos;
  for (const auto& row : rows) {
    if ((model.empty() || row.model == model) && (quantity.empty() || row.quantity == quantity)) {
      const std::pair<std::string, std::string> k{row.model, row.quantity};
      if (std::find(combos.begin(), combos.end(), k) == combos.end()) combos.push_back(k);
    }
  }
  if (combos.empty()) throw InputError(report_path, 0, "no matching rows");
  OutDir out(out_dir);
  for (const auto& [mod, q] : combos) {
    std::string safe = mod;
    for (char& ch : safe) {
      if (ch == '+') ch = 'p';
      if (ch == '-') ch = 'm';
    }
    out.write("sobol_" + safe + "_" + q + ".svg", svg::sobol_boxplot(rows, mod, q));
  }
  finish(out, std::move(m));
  return 0;
}

inline int run_cli(const std::vector<std::string>& args, bool allow_replay = true);

inline int cmd_replay(const std::string& manifest_path, const std::string& out_override, bool allow) {
  if (!allow) throw ValidationError("replay", "a manifest cannot replay another replay");
  const auto m = read_manifest(manifest_path);
  if (m.version != kToolVersion) {
    std::cerr << "ventsim: warning: manifest written by version " << m.version << ", running " << kToolVersion
              << "\n";
  }
  const auto changed = changed_inputs(m);
  if (!changed.empty()) {
    std::string list;
    for (const auto& c : changed) list += (list.empty() ? "" : ", ") + c;
    throw InputError(manifest_path, 0, "inputs changed since the run: " + list);
  }
  auto args = m.args;
  if (!out_override.empty()) {
    bool replaced = false;
    for (std::size_t i = 0; i + 1 < args.size(); ++i) {
      if (args[i] == "--out") {
        args[i + 1] = out_override;
        replaced = true;
      } else if (args[i].starts_with("--out=")) {
        args[i] = "--out=" + out_override;
        replaced = true;
      }
    }
    if (!replaced && !args.empty() && args.back().starts_with("--out=")) {
      args.back() = "--out=" + out_override;
      replaced = true;
    }
    if (!replaced) throw InputError(manifest_path, 0, "recorded arguments have no --out");
  }
  return run_cli(args, false);
}

inline void add_common(CLI::App* sub, CommonRun& c, bool needs_inputs) {
  auto* s = sub->add_option("--scenario", c.scenario, "Scenario document (JSON)");
  auto* w = sub->add_option("--weather", c.weather, "Weather CSV (raw series or fitted windows)");
  if (needs_inputs) {
    s->required();
    w->required();
  }
  sub->add_option("--models", c.models, "ensemble or a comma list of cross+, cross-, single, richardson")
      ->capture_default_str();
  sub->add_option("--coeffs", c.coeffs, "Richardson coefficients CSV");
  sub->add_option("--config", c.config, "Ventilation configuration name (default: the scenario's active one)");
  sub->add_option("--seed", c.seed, "Random seed (required)");
  sub->add_option("--out", c.out, "Output directory")->required();
  sub->add_option("--spinup-hours", c.spinup_hours, "Discarded spin-up period")->capture_default_str();
  sub->add_option("--dt", c.dt, "Integration step in seconds")->capture_default_str();
  sub->add_option("--threads", c.threads, "Worker threads (0: all cores)")->capture_default_str();
}

inline int run_cli(const std::vector<std::string>& args, bool allow_replay) {
  CLI::App app{"Naturally ventilated dwelling: indoor temperature and ACH under uncertainty", "ventsim"};
  app.set_version_flag("--version", std::string(kToolVersion));
  app.require_subcommand(1);

  CommonRun sim;
  bool emit_samples = false;
  auto* simulate = app.add_subcommand("simulate", "Monte-Carlo simulation with mean and 95% CI per model");
  add_common(simulate, sim, true);
  simulate->add_option("--samples", sim.samples, "Monte-Carlo sample count")->capture_default_str();
  simulate->add_flag("--emit-samples", emit_samples, "Also write every sample's t_air and ACH series");

  std::string fw_weather, fw_scenario, fw_out;
  double fw_window = 30.0;
  auto* fit_weather = app.add_subcommand("fit-weather", "Fit per-window weather distributions");
  fit_weather->add_option("--weather", fw_weather, "Raw weather CSV")->required();
  fit_weather->add_option("--scenario", fw_scenario, "Scenario (for the wind height correction)");
  fit_weather->add_option("--window-minutes", fw_window, "Window length")->capture_default_str();
  fit_weather->add_option("--out", fw_out, "Output directory")->required();

  std::string fr_points, fr_out;
  auto* fit_rich = app.add_subcommand("fit-richardson", "Fit Richardson-fit coefficients");
  fit_rich->add_option("--points", fr_points, "CSV with ri_v,nondim_rate[,weight]")->required();
  fit_rich->add_option("--out", fr_out, "Output directory")->required();

  std::vector<std::string> ad_decay;
  std::string ad_context, ad_scenario, ad_out;
  double ad_background = 0.0;
  auto* ach_decay = app.add_subcommand("ach-decay", "ACH measurements from tracer decay records");
  ach_decay->add_option("--decay", ad_decay, "Decay CSV (timestamp,concentration); repeatable")->required();
  ach_decay->add_option("--context", ad_context, "Measurement context CSV")->required();
  ach_decay->add_option("--scenario", ad_scenario, "Scenario (volume, configurations)")->required();
  ach_decay->add_option("--background", ad_background, "Constant background concentration to subtract")
      ->capture_default_str();
  ach_decay->add_option("--out", ad_out, "Output directory")->required();

  CommonRun sob;
  sob.samples = 512;
  std::vector<std::string> sob_windows;
  std::string sob_eval;
  bool sob_steps = false;
  auto* sobol = app.add_subcommand("sobol", "First-order Sobol indices over daily windows");
  add_common(sobol, sob, false);
  sobol->add_option("--samples", sob.samples, "Saltelli base sample count (>= 64)")->capture_default_str();
  sobol->add_option("--window", sob_windows, "day, night or H[:MM]..H[:MM]; repeatable (default: day and night)");
  sobol->add_option("--evaluator", sob_eval, "Analytic test function linear:a1,a2,... instead of the model");
  sobol->add_flag("--emit-steps", sob_steps, "Also write the per-minute indices");

  auto* plot = app.add_subcommand("plot", "Render SVG figures from reports");
  plot->require_subcommand(1);
  std::string pb_report, pb_quantity = "all", pb_out;
  auto* band = plot->add_subcommand("band", "Mean and 95% CI over time");
  band->add_option("--report", pb_report, "UQ report CSV")->required();
  band->add_option("--quantity", pb_quantity, "t_air, ach or all")->capture_default_str();
  band->add_option("--out", pb_out, "Output directory")->required();
  std::string ps_report, ps_meas, ps_ctx, ps_model = "ensemble", ps_start = "00:00", ps_out;
  auto* scatter = plot->add_subcommand("scatter", "Predicted vs measured ACH");
  scatter->add_option("--report", ps_report, "UQ report CSV")->required();
  scatter->add_option("--measurements", ps_meas, "Measurements CSV from ach-decay")->required();
  scatter->add_option("--context", ps_ctx, "Measurement context CSV")->required();
  scatter->add_option("--model", ps_model, "Model whose band is used")->capture_default_str();
  scatter->add_option("--report-start", ps_start, "Time of day at report time 0 (HH:MM)")->capture_default_str();
  scatter->add_option("--out", ps_out, "Output directory")->required();
  std::string pv_report, pv_model, pv_quantity, pv_out;
  auto* box = plot->add_subcommand("sobol", "Box plots of first-order indices");
  box->add_option("--report", pv_report, "Sobol report CSV")->required();
  box->add_option("--model", pv_model, "Only this model");
  box->add_option("--quantity", pv_quantity, "Only this quantity");
  box->add_option("--out", pv_out, "Output directory")->required();

  std::string rp_manifest, rp_out;
  auto* replay = app.add_subcommand("replay", "Re-run the command recorded in a manifest");
  replay->add_option("--manifest", rp_manifest, "manifest.json")->required();
  replay->add_option("--out", rp_out, "Write to this directory instead of the recorded one");

  try {
    std::vector<std::string> rev(args.rbegin(), args.rend());
    app.parse(rev);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? 0 : 1;
  }

  try {
    if (*simulate) return cmd_simulate(sim, emit_samples, args);
    if (*fit_weather) return cmd_fit_weather(fw_weather, fw_scenario, fw_window, fw_out, args);
    if (*fit_rich) return cmd_fit_richardson(fr_points, fr_out, args);
    if (*ach_decay) return cmd_ach_decay(ad_decay, ad_context, ad_scenario, ad_background, ad_out, args);
    if (*sobol) {
      if (sob_eval.empty() && (sob.scenario.empty() || sob.weather.empty())) {
        throw ValidationError("sobol", "--scenario and --weather are required unless --evaluator is given");
      }
      return cmd_sobol(sob, sob_windows, sob_eval, sob_steps, args);
    }
    if (*band) return cmd_plot_band(pb_report, pb_quantity, pb_out, args);
    if (*scatter) return cmd_plot_scatter(ps_report, ps_meas, ps_ctx, ps_model, ps_start, ps_out, args);
    if (*box) return cmd_plot_sobol(pv_report, pv_model, pv_quantity, pv_out, args);
    if (*replay) return cmd_replay(rp_manifest, rp_out, allow_replay);
  } catch (const SolverError& e) {
    std::cerr << "ventsim: solver error: " << e.what() << "\n";
    return 2;
  } catch (const Error& e) {
    std::cerr << "ventsim: error: " << e.what() << "\n";
    return 1;
  } catch (const std::filesystem::filesystem_error& e) {
    std::cerr << "ventsim: error: " << e.what() << "\n";
    return 1;
  }
  return 1;
}

}  // namespace ventsim::cli
