#include <gtest/gtest.h>

#include <atomic>
#include <cmath>
#include <numeric>

#include "support.hpp"
#include "ventsim/uq.hpp"

using namespace ventsim;

namespace {

const WindowedDistributions& example_windows() {
  static const WindowedDistributions d = [] {
    const auto loaded = read_weather_csv(testing_support::data_path("example_weather.csv"));
    return fit_window_distributions(moving_average(correct_wind_height(loaded.series, 10.0, 2.42), 30.0));
  }();
  return d;
}

WindowedDistributions constant_windows(double t_out, std::size_t n = 48) {
  WindowedDistributions d;
  d.windows.assign(n, WindowDistributions{{t_out, 0.0}, {0.0, 0.0}, {1.5, std::numeric_limits<double>::infinity()}});
  return d;
}

double mean_width(const Band& b) {
  double s = 0.0;
  for (std::size_t k = 0; k < b.mean.size(); ++k) s += b.ci_high[k] - b.ci_low[k];
  return s / static_cast<double>(b.mean.size());
}

SamplingPlan plan(std::size_t n, std::uint64_t seed) {
  SamplingPlan p;
  p.n_samples = n;
  p.seed = seed;
  return p;
}

MonteCarloOptions one_thread() {
  MonteCarloOptions o;
  o.threads = 1;
  return o;
}

}  // namespace

TEST(Sampling, DrawsStayInsideTheRanges) {
  const auto samples = sample_parameters(plan(1000, 99));
  ASSERT_EQ(samples.size(), 1000u);
  for (const auto& s : samples) {
    ASSERT_GE(s.h_in, 1.0);
    ASSERT_LE(s.h_in, 4.0);
    ASSERT_GE(s.h_out, 1.0);
    ASSERT_LE(s.h_out, 15.0);
    ASSERT_GE(s.rho_roof, 0.60);
    ASSERT_LE(s.rho_roof, 0.75);
    ASSERT_GE(s.eps_roof, 0.80);
    ASSERT_LE(s.eps_roof, 0.90);
    for (double p : {s.p_temp, s.p_rad, s.p_wind}) {
      ASSERT_GT(p, 0.0);
      ASSERT_LT(p, 1.0);
    }
  }
}

TEST(Sampling, SameSeedSameSamples) {
  EXPECT_EQ(sample_parameters(plan(200, 5)), sample_parameters(plan(200, 5)));
  EXPECT_NE(sample_parameters(plan(200, 5)), sample_parameters(plan(200, 6)));
}

TEST(Sampling, LawOfLargeNumbers) {
  const auto samples = sample_parameters(plan(100000, 1));
  double sum = 0.0;
  for (const auto& s : samples) sum += s.h_in;
  EXPECT_NEAR(sum / 1e5, 2.5, 0.02);
}

TEST(Sampling, TooFewSamplesIsAnError) { EXPECT_THROW(sample_parameters(plan(1, 0)), ValidationError); }

TEST(Percentile, LinearInterpolation) {
  const std::vector<double> v = {1.0, 2.0, 3.0, 4.0, 5.0};
  EXPECT_DOUBLE_EQ(sorted_percentile(v, 0.0), 1.0);
  EXPECT_DOUBLE_EQ(sorted_percentile(v, 1.0), 5.0);
  EXPECT_DOUBLE_EQ(sorted_percentile(v, 0.5), 3.0);
  EXPECT_DOUBLE_EQ(sorted_percentile(v, 0.025), 1.1);
  EXPECT_DOUBLE_EQ(sorted_percentile(v, 0.975), 4.9);
}

TEST(MonteCarlo, IdenticalSamplesCollapseTheInterval) {
  auto p = plan(2, 3);
  for (auto param : kAllParameters) {
    const double mid = 0.5 * (p.ranges[param].lo + p.ranges[param].hi);
    p.ranges[param] = {mid, mid};
  }
  const auto r = run_monte_carlo(testing_support::scenario(), example_windows(), p,
                                 {VentModelKind::SingleSided}, std::nullopt, one_thread());
  const auto& b = r.report.models.at(0);
  for (std::size_t k = 0; k < r.report.time.size(); ++k) {
    EXPECT_EQ(b.t_air.ci_low[k], b.t_air.mean[k]);
    EXPECT_EQ(b.t_air.ci_high[k], b.t_air.mean[k]);
    EXPECT_EQ(b.ach.ci_low[k], b.ach.mean[k]);
    EXPECT_EQ(b.ach.ci_high[k], b.ach.mean[k]);
  }
}

TEST(MonteCarlo, RadiationOffEquilibriumIsDeterministic) {
  auto doc = testing_support::scenario_json();
  doc["masses"][0]["emissivity_indoor"] = 0.0;
  doc["masses"][5]["constant_temperature_c"] = "outdoor_mean";
  const auto s = validate_scenario(doc);
  auto p = plan(30, 8);
  p.ranges[Parameter::eps_roof] = {0.0, 0.0};
  const double t_out = 300.5;
  const auto r = run_monte_carlo(s, constant_windows(t_out), p, {kEnsembleModels.begin(), kEnsembleModels.end()},
                                 std::nullopt, one_thread());
  for (const auto& mb : r.report.models) {
    for (std::size_t k = 0; k < r.report.time.size(); ++k) {
      ASSERT_NEAR(mb.t_air.mean[k], t_out, 1e-9);
      ASSERT_LT(mb.t_air.ci_high[k] - mb.t_air.ci_low[k], 1e-9);
    }
  }
}

TEST(MonteCarlo, EnsembleStructureAndEnvelope) {
  std::atomic<int> calls{0};
  auto opt = one_thread();
  opt.on_result = [&](const SimulationResult&) { ++calls; };
  const auto r = run_monte_carlo(testing_support::scenario(), example_windows(), plan(12, 21),
                                 parse_model_selection("ensemble"), std::nullopt, opt);
  EXPECT_EQ(calls.load(), 36);
  ASSERT_EQ(r.series.size(), 3u);
  for (const auto& s : r.series) {
    for (char ok : s.ok) EXPECT_TRUE(ok);
  }
  ASSERT_TRUE(r.report.ensemble);
  const auto& e = *r.report.ensemble;
  EXPECT_EQ(e.model, "ensemble");
  for (std::size_t k = 0; k < r.report.time.size(); ++k) {
    double lo = 1e300, hi = -1e300, mean = 0.0;
    for (const auto& m : r.report.models) {
      lo = std::min(lo, m.t_air.ci_low[k]);
      hi = std::max(hi, m.t_air.ci_high[k]);
      mean += m.t_air.mean[k] / 3.0;
    }
    ASSERT_EQ(e.t_air.ci_low[k], lo);
    ASSERT_EQ(e.t_air.ci_high[k], hi);
    ASSERT_NEAR(e.t_air.mean[k], mean, 1e-9);
  }
}

TEST(MonteCarlo, SingleModelHasNoEnvelope) {
  const auto r = run_monte_carlo(testing_support::scenario(), example_windows(), plan(4, 2),
                                 {VentModelKind::CrossAssisting}, std::nullopt, one_thread());
  EXPECT_FALSE(r.report.ensemble);
  EXPECT_EQ(r.report.time.size(), 24u * 60u + 1u);
}

TEST(MonteCarlo, MeanInsideIntervalOnRealRuns) {
  const auto r = run_monte_carlo(testing_support::scenario(), example_windows(), plan(60, 4),
                                 parse_model_selection("ensemble"), std::nullopt, one_thread());
  for (const auto& m : r.report.models) {
    for (const Band* b : {&m.t_air, &m.ach}) {
      for (std::size_t k = 0; k < b->mean.size(); ++k) {
        ASSERT_LE(b->ci_low[k], b->mean[k]) << m.model << " " << k;
        ASSERT_LE(b->mean[k], b->ci_high[k]) << m.model << " " << k;
      }
    }
  }
}

TEST(MonteCarlo, ThreadCountDoesNotChangeResults) {
  auto many = one_thread();
  many.threads = 3;
  const auto a = run_monte_carlo(testing_support::scenario(), example_windows(), plan(9, 77),
                                 parse_model_selection("ensemble"), std::nullopt, one_thread());
  const auto b = run_monte_carlo(testing_support::scenario(), example_windows(), plan(9, 77),
                                 parse_model_selection("ensemble"), std::nullopt, many);
  EXPECT_EQ(uq_report_to_csv(a.report), uq_report_to_csv(b.report));
  EXPECT_EQ(a.series[1].t_air, b.series[1].t_air);
}

TEST(MonteCarlo, WideningARangeDoesNotShrinkTheInterval) {
  auto narrow = plan(80, 31);
  narrow.ranges[Parameter::h_out] = {7.0, 9.0};
  const auto wide = plan(80, 31);
  const auto a = run_monte_carlo(testing_support::scenario(), example_windows(), narrow,
                                 {VentModelKind::SingleSided}, std::nullopt, one_thread());
  const auto b = run_monte_carlo(testing_support::scenario(), example_windows(), wide, {VentModelKind::SingleSided},
                                 std::nullopt, one_thread());
  EXPECT_GE(mean_width(b.report.models[0].t_air), 0.98 * mean_width(a.report.models[0].t_air));
}

TEST(MonteCarlo, RichardsonModelNeedsCoefficients) {
  EXPECT_THROW(run_monte_carlo(testing_support::scenario(), example_windows(), plan(2, 1),
                               {VentModelKind::RichardsonFit}, std::nullopt, one_thread()),
               ValidationError);
  const auto r = run_monte_carlo(testing_support::scenario(), example_windows(), plan(3, 1),
                                 {VentModelKind::RichardsonFit}, RichardsonCoefficients{0.08, 0.02, 0.05},
                                 one_thread());
  EXPECT_EQ(r.report.models[0].model, "richardson");
}

TEST(MonteCarlo, ReportCsvRoundTrip) {
  const auto r = run_monte_carlo(testing_support::scenario(), example_windows(), plan(5, 12),
                                 parse_model_selection("ensemble"), std::nullopt, one_thread());
  const auto dir = testing_support::temp_dir("uq");
  const auto text = uq_report_to_csv(r.report);
  testing_support::write_text(dir / "uq.csv", text);
  const auto back = read_uq_report_csv((dir / "uq.csv").string());
  EXPECT_EQ(back.time, r.report.time);
  ASSERT_EQ(back.models.size(), 3u);
  ASSERT_TRUE(back.ensemble);
  EXPECT_EQ(back.models[2].ach.ci_high, r.report.models[2].ach.ci_high);
  EXPECT_EQ(uq_report_to_csv(back), text);
  EXPECT_EQ(text.substr(0, text.find('\n')), "time_s,model,quantity,mean,ci_low,ci_high");
}
