#pragma once

// Monte-Carlo propagation of the uncertain inputs through the thermal model,
// once per ventilation model, with pointwise mean and empirical 95% interval.

#include <algorithm>
#include <cmath>
#include <functional>
#include <mutex>
#include <numeric>
#include <optional>
#include <string>
#include <vector>

#include "ventsim/btm.hpp"
#include "ventsim/csv.hpp"
#include "ventsim/domain.hpp"
#include "ventsim/sampling.hpp"
#include "ventsim/vent.hpp"
#include "ventsim/weather.hpp"

namespace ventsim {

/// Pointwise summary of one quantity across samples.
struct Band {
  std::vector<double> mean;
  std::vector<double> ci_low;   // 2.5th percentile
  std::vector<double> ci_high;  // 97.5th percentile
};

struct ModelBands {
  std::string model;  // "cross+", ..., or "ensemble" for the envelope
  Band t_air;
  Band ach;
};

struct UqReport {
  std::vector<double> time;
  std::vector<ModelBands> models;
  // Pointwise min ci_low / max ci_high across the three ensemble members;
  // mean is the average of the members' means. Present only when all three
  // ran.
  std::optional<ModelBands> ensemble;
};

struct SampleFailure {
  std::size_t sample = 0;
  VentModelKind model = VentModelKind::SingleSided;
  double time = 0.0;
  std::string message;
};

struct MonteCarloOptions {
  IntegrationOptions integration;
  unsigned threads = 0;  // 0: hardware concurrency
  double max_failure_fraction = 0.01;
  // Called from worker threads with each finished run; must be thread safe.
  std::function<void(const SimulationResult&)> on_result;
};

/// Per-sample outputs kept after a run: t_air and ach for every (model,
/// sample), row-major by sample.
struct SampleSeries {
  VentModelKind model;
  std::size_t steps = 0;
  std::vector<double> t_air;
  std::vector<double> ach;
  std::vector<char> ok;  // per sample

  double t_air_at(std::size_t sample, std::size_t step) const { return t_air[sample * steps + step]; }
  double ach_at(std::size_t sample, std::size_t step) const { return ach[sample * steps + step]; }
};

struct MonteCarloResult {
  UqReport report;
  std::vector<ParameterSample> samples;
  std::vector<SampleSeries> series;  // one per model, in request order
  std::vector<SampleFailure> failures;
};

namespace detail {

inline Band summarize(const std::vector<double>& values, const std::vector<char>& ok, std::size_t n_samples,
                      std::size_t steps) {
  Band b;
  b.mean.resize(steps);
  b.ci_low.resize(steps);
  b.ci_high.resize(steps);
  std::vector<double> col;
  col.reserve(n_samples);
  for (std::size_t k = 0; k < steps; ++k) {
    col.clear();
    for (std::size_t i = 0; i < n_samples; ++i) {
      if (ok[i]) col.push_back(values[i * steps + k]);
    }
    // Accumulate in sample order so the mean does not depend on sorting.
    b.mean[k] = std::accumulate(col.begin(), col.end(), 0.0) / static_cast<double>(col.size());
    std::sort(col.begin(), col.end());
    b.ci_low[k] = sorted_percentile(col, 0.025);
    b.ci_high[k] = sorted_percentile(col, 0.975);
  }
  return b;
}

inline Band envelope(const std::vector<const Band*>& members) {
  Band e = *members.front();
  for (std::size_t k = 0; k < e.mean.size(); ++k) {
    double mean = 0.0;
    for (const Band* m : members) {
      mean += m->mean[k];
      e.ci_low[k] = std::min(e.ci_low[k], m->ci_low[k]);
      e.ci_high[k] = std::max(e.ci_high[k], m->ci_high[k]);
    }
    e.mean[k] = mean / static_cast<double>(members.size());
  }
  return e;
}

}  // namespace detail

/// For each sample: synthesise the weather trace from its three
/// probabilities, then integrate once per requested model. Failed runs are
/// recorded; the whole call fails if more than 1% of runs abort.
inline MonteCarloResult run_monte_carlo(const ScenarioConfig& scenario_in, const WindowedDistributions& windows,
                                        const SamplingPlan& plan, const std::vector<VentModelKind>& models,
                                        const std::optional<RichardsonCoefficients>& coeffs = std::nullopt,
                                        const MonteCarloOptions& opt = {}) {
  if (models.empty()) throw ValidationError("models", "no ventilation model selected");
  const ScenarioConfig scenario = resolve_floor_temperature(scenario_in, windows.mean_outdoor_temp());
  MonteCarloResult out;
  out.samples = sample_parameters(plan);
  const std::size_t n = out.samples.size();

  std::vector<VentilationModel> vents;
  for (auto m : models) vents.emplace_back(m, scenario.ventilation, scenario.geometry.reference_height, coeffs);

  IntegrationOptions iopt = opt.integration;
  const double horizon = iopt.horizon > 0.0 ? iopt.horizon : windows.horizon();
  iopt.horizon = horizon;
  const auto steps = static_cast<std::size_t>(std::llround(horizon / iopt.output_interval)) + 1;
  out.report.time.resize(steps);
  for (std::size_t k = 0; k < steps; ++k) out.report.time[k] = static_cast<double>(k) * iopt.output_interval;

  out.series.resize(models.size());
  for (std::size_t m = 0; m < models.size(); ++m) {
    auto& s = out.series[m];
    s.model = models[m];
    s.steps = steps;
    s.t_air.assign(n * steps, 0.0);
    s.ach.assign(n * steps, 0.0);
    s.ok.assign(n, 0);
  }

  std::vector<std::vector<SampleFailure>> failures(n);
  parallel_for(n * models.size(), opt.threads, [&](std::size_t job) {
    const std::size_t i = job / models.size();
    const std::size_t m = job % models.size();
    const auto& sample = out.samples[i];
    const auto trace = synthesize_trace(windows, sample.p_temp, sample.p_rad, sample.p_wind);
    IntegrationOptions local = iopt;
    local.sample_id = i;
    try {
      auto res = integrate_with(scenario, trace, sample, vents[m], local);
      res.model = models[m];
      auto& s = out.series[m];
      std::copy(res.t_air.begin(), res.t_air.end(), s.t_air.begin() + static_cast<std::ptrdiff_t>(i * steps));
      std::copy(res.ach.begin(), res.ach.end(), s.ach.begin() + static_cast<std::ptrdiff_t>(i * steps));
      s.ok[i] = 1;
      if (opt.on_result) opt.on_result(res);
    } catch (const SolverError& e) {
      // Slots for sample i are only touched by the jobs of sample i; the
      // per-sample vector is appended by at most one job per model.
      static std::mutex mu;
      std::lock_guard lock(mu);
      failures[i].push_back({i, models[m], e.time(), e.what()});
    }
  });
  for (auto& f : failures) {
    std::sort(f.begin(), f.end(), [](const auto& a, const auto& b) { return a.model < b.model; });
    out.failures.insert(out.failures.end(), f.begin(), f.end());
  }
  const double fraction = static_cast<double>(out.failures.size()) / static_cast<double>(n * models.size());
  if (fraction > opt.max_failure_fraction) {
    const auto& first = out.failures.front();
    throw SolverError(first.time, std::to_string(out.failures.size()) + " of " + std::to_string(n * models.size()) +
                                      " runs aborted; first: sample " + std::to_string(first.sample) + ": " +
                                      first.message);
  }

  for (const auto& s : out.series) {
    ModelBands mb;
    mb.model = std::string(to_string(s.model));
    mb.t_air = detail::summarize(s.t_air, s.ok, n, steps);
    mb.ach = detail::summarize(s.ach, s.ok, n, steps);
    out.report.models.push_back(std::move(mb));
  }

  std::vector<const ModelBands*> members;
  for (auto k : kEnsembleModels) {
    for (const auto& mb : out.report.models) {
      if (mb.model == to_string(k)) members.push_back(&mb);
    }
  }
  if (members.size() == kEnsembleModels.size()) {
    ModelBands env;
    env.model = "ensemble";
    std::vector<const Band*> t, a;
    for (const auto* m : members) {
      t.push_back(&m->t_air);
      a.push_back(&m->ach);
    }
    env.t_air = detail::envelope(t);
    env.ach = detail::envelope(a);
    out.report.ensemble = std::move(env);
  }
  return out;
}

/// `time_s,model,quantity,mean,ci_low,ci_high`; t_air in kelvin, ach in 1/h.
inline std::string uq_report_to_csv(const UqReport& r) {
  csv::Writer w({"time_s", "model", "quantity", "mean", "ci_low", "ci_high"});
  std::vector<const ModelBands*> all;
  for (const auto& m : r.models) all.push_back(&m);
  if (r.ensemble) all.push_back(&*r.ensemble);
  for (std::size_t k = 0; k < r.time.size(); ++k) {
    for (const auto* m : all) {
      w.row(r.time[k], m->model, "t_air", m->t_air.mean[k], m->t_air.ci_low[k], m->t_air.ci_high[k]);
      w.row(r.time[k], m->model, "ach", m->ach.mean[k], m->ach.ci_low[k], m->ach.ci_high[k]);
    }
  }
  return w.str();
}

/// Parse a report written by uq_report_to_csv().
inline UqReport read_uq_report_csv(const std::string& path) {
  const auto t = csv::Table::read_file(path);
  const auto c_time = t.require_column("time_s");
  const auto c_model = t.require_column("model");
  const auto c_q = t.require_column("quantity");
  const auto c_mean = t.require_column("mean");
  const auto c_lo = t.require_column("ci_low");
  const auto c_hi = t.require_column("ci_high");
  UqReport r;
  auto find_model = [&](const std::string& name) -> ModelBands& {
    if (name == "ensemble") {
      if (!r.ensemble) {
        r.ensemble.emplace();
        r.ensemble->model = name;
      }
      return *r.ensemble;
    }
    for (auto& m : r.models) {
      if (m.model == name) return m;
    }
    r.models.push_back({name, {}, {}});
    return r.models.back();
  };
  for (std::size_t row = 0; row < t.size(); ++row) {
    const double time = t.number(row, c_time);
    if (r.time.empty() || r.time.back() != time) {
      if (!r.time.empty() && time < r.time.back()) throw InputError(path, t.line(row), "time must not decrease");
      r.time.push_back(time);
    }
    auto& mb = find_model(std::string(t.field(row, c_model)));
    const std::string q(t.field(row, c_q));
    Band* band = q == "t_air" ? &mb.t_air : (q == "ach" ? &mb.ach : nullptr);
    if (!band) throw InputError(path, t.line(row), "unknown quantity '" + q + "'");
    if (band->mean.size() + 1 != r.time.size()) throw InputError(path, t.line(row), "ragged report");
    band->mean.push_back(t.number(row, c_mean));
    band->ci_low.push_back(t.number(row, c_lo));
    band->ci_high.push_back(t.number(row, c_hi));
  }
  if (r.time.empty()) throw InputError(path, 0, "empty report");
  return r;
}

}  // namespace ventsim
