#include <gtest/gtest.h>

#include <filesystem>

#include "support.hpp"
#include "ventsim/cli.hpp"
#include "ventsim/sobol.hpp"

using namespace ventsim;
namespace fs = std::filesystem;

namespace {

int run(std::vector<std::string> args) { return cli::run_cli(args); }

std::string data(const char* name) { return testing_support::data_path(name); }

std::vector<std::string> simulate_args(const fs::path& out, const char* seed = "7") {
  return {"simulate", "--scenario", data("example_scenario.json"), "--weather", data("example_weather.csv"),
          "--samples", "4", "--seed", seed, "--threads", "1", "--out", out.string()};
}

}  // namespace

TEST(Cli, HelpAndVersionExitZero) {
  EXPECT_EQ(run({"--help"}), 0);
  EXPECT_EQ(run({"simulate", "--help"}), 0);
  EXPECT_EQ(run({"--version"}), 0);
  EXPECT_EQ(run({}), 1);
  EXPECT_EQ(run({"no-such-command"}), 1);
}

TEST(Cli, SimulateWritesReportAndManifest) {
  const auto dir = testing_support::temp_dir("cli_sim");
  const auto out = dir / "run";
  ASSERT_EQ(run(simulate_args(out)), 0);
  for (const char* f : {"uq_report.csv", "windows.csv", "samples.csv", "manifest.json"}) {
    EXPECT_TRUE(fs::exists(out / f)) << f;
  }
  const auto r = read_uq_report_csv((out / "uq_report.csv").string());
  EXPECT_EQ(r.models.size(), 3u);
  EXPECT_TRUE(r.ensemble);
  // Nothing besides the output directory appears next to it.
  std::size_t entries = 0;
  for ([[maybe_unused]] const auto& e : fs::directory_iterator(dir)) ++entries;
  EXPECT_EQ(entries, 1u);
}

TEST(Cli, InputErrorsExitOne) {
  const auto dir = testing_support::temp_dir("cli_err");
  auto args = simulate_args(dir / "a");
  args[4] = (dir / "missing.csv").string();
  EXPECT_EQ(run(args), 1);

  auto no_seed = simulate_args(dir / "b");
  no_seed.erase(no_seed.begin() + 7, no_seed.begin() + 9);
  EXPECT_EQ(run(no_seed), 1);

  auto bad_models = simulate_args(dir / "c");
  bad_models.insert(bad_models.end(), {"--models", "cross*"});
  EXPECT_EQ(run(bad_models), 1);

  auto rich_no_coeffs = simulate_args(dir / "d");
  rich_no_coeffs.insert(rich_no_coeffs.end(), {"--models", "richardson"});
  EXPECT_EQ(run(rich_no_coeffs), 1);

  EXPECT_EQ(run({"simulate", "--scenario", data("example_scenario.json"), "--weather", data("example_weather.csv"),
                 "--seed", "1", "--dt", "0", "--out", (dir / "e").string()}),
            1);
}

TEST(Cli, FitWeatherWritesWindows) {
  const auto out = testing_support::temp_dir("cli_fw") / "w";
  ASSERT_EQ(run({"fit-weather", "--weather", data("example_weather.csv"), "--scenario", data("example_scenario.json"),
                 "--out", out.string()}),
            0);
  const auto table = csv::Table::read_file((out / "windows.csv").string());
  EXPECT_TRUE(is_windows_csv(table));
  EXPECT_EQ(windows_from_table(table).windows.size(), 48u);
}

TEST(Cli, FitRichardsonWritesCoefficients) {
  const auto dir = testing_support::temp_dir("cli_fr");
  std::string text = "ri_v,nondim_rate\n";
  for (int i = 0; i < 17; ++i) {
    const double ri = -1.5 + 2.0 * i / 16.0;
    text += csv::fmt(ri) + "," + csv::fmt(std::sqrt(std::fabs(0.08 * ri + 0.02)) + 0.05) + "\n";
  }
  testing_support::write_text(dir / "pts.csv", text);
  ASSERT_EQ(run({"fit-richardson", "--points", (dir / "pts.csv").string(), "--out", (dir / "o").string()}), 0);
  const auto c = read_coefficients_csv((dir / "o" / "coeffs.csv").string());
  EXPECT_NEAR(c.c1, 0.08, 1e-4);
  EXPECT_NEAR(c.c2, 0.02, 1e-4);
  EXPECT_NEAR(c.c3, 0.05, 1e-4);
}

TEST(Cli, AchDecayMatchesContextRows) {
  const auto out = testing_support::temp_dir("cli_ach") / "m";
  ASSERT_EQ(run({"ach-decay", "--decay", data("decay_day.csv"), "--decay", data("decay_night.csv"), "--context",
                 data("tracer_context.csv"), "--scenario", data("example_scenario.json"), "--out", out.string()}),
            0);
  const auto ms = read_measurements_csv((out / "measurements.csv").string());
  ASSERT_EQ(ms.size(), 2u);
  EXPECT_EQ(ms[0].config, "window_roof_vent");
  EXPECT_NEAR(ms[0].m.ach_mean, 6.0, 0.3);
  EXPECT_EQ(ms[1].config, "skylight_window");
  EXPECT_NEAR(ms[1].m.ach_mean, 11.0, 0.3);
}

TEST(Cli, AchDecayWithoutCoveringRecordFails) {
  const auto out = testing_support::temp_dir("cli_ach2") / "m";
  EXPECT_EQ(run({"ach-decay", "--decay", data("decay_day.csv"), "--context", data("tracer_context.csv"),
                 "--scenario", data("example_scenario.json"), "--out", out.string()}),
            1);
  EXPECT_FALSE(fs::exists(out / "measurements.csv"));
}

TEST(Cli, SobolLinearEvaluator) {
  const auto out = testing_support::temp_dir("cli_sobol") / "s";
  ASSERT_EQ(run({"sobol", "--evaluator", "linear:1,2", "--samples", "4096", "--seed", "1", "--out", out.string()}), 0);
  const auto rows = read_sobol_report_csv((out / "sobol.csv").string());
  ASSERT_EQ(rows.size(), 2u);
  EXPECT_NEAR(rows[0].stats.median, 0.2, 0.05);
  EXPECT_NEAR(rows[1].stats.median, 0.8, 0.05);
  EXPECT_TRUE(fs::exists(out / "sobol_steps.csv"));

  EXPECT_EQ(run({"sobol", "--evaluator", "linear:1,x", "--seed", "1", "--out", (out / "bad").string()}), 1);
  EXPECT_EQ(run({"sobol", "--evaluator", "linear:1", "--samples", "32", "--seed", "1", "--out",
                 (out / "small").string()}),
            1);
}

TEST(Cli, PlotsRenderSvg) {
  const auto dir = testing_support::temp_dir("cli_plot");
  ASSERT_EQ(run(simulate_args(dir / "sim")), 0);
  const auto report = (dir / "sim" / "uq_report.csv").string();

  ASSERT_EQ(run({"plot", "band", "--report", report, "--out", (dir / "band").string()}), 0);
  for (const char* f : {"band_t_air.svg", "band_ach.svg"}) {
    const auto text = testing_support::read_text(dir / "band" / f);
    EXPECT_NE(text.find("<svg"), std::string::npos) << f;
  }
  EXPECT_EQ(run({"plot", "band", "--report", report, "--quantity", "humidity", "--out", (dir / "x").string()}), 1);

  ASSERT_EQ(run({"ach-decay", "--decay", data("decay_day.csv"), "--decay", data("decay_night.csv"), "--context",
                 data("tracer_context.csv"), "--scenario", data("example_scenario.json"), "--out",
                 (dir / "m").string()}),
            0);
  ASSERT_EQ(run({"plot", "scatter", "--report", report, "--measurements", (dir / "m" / "measurements.csv").string(),
                 "--context", data("tracer_context.csv"), "--out", (dir / "scatter").string()}),
            0);
  EXPECT_TRUE(fs::exists(dir / "scatter" / "ach_scatter.svg"));

  ASSERT_EQ(run({"sobol", "--evaluator", "linear:1,2,3", "--samples", "256", "--seed", "3", "--out",
                 (dir / "sob").string()}),
            0);
  ASSERT_EQ(run({"plot", "sobol", "--report", (dir / "sob" / "sobol.csv").string(), "--out",
                 (dir / "box").string()}),
            0);
  EXPECT_TRUE(fs::exists(dir / "box" / "sobol_linear_y.svg"));
}

TEST(Cli, ReplayReproducesOutputsExactly) {
  const auto dir = testing_support::temp_dir("cli_replay");
  ASSERT_EQ(run(simulate_args(dir / "first", "11")), 0);
  ASSERT_EQ(run({"replay", "--manifest", (dir / "first" / "manifest.json").string(), "--out",
                 (dir / "second").string()}),
            0);
  for (const char* f : {"uq_report.csv", "samples.csv", "windows.csv"}) {
    EXPECT_EQ(testing_support::read_text(dir / "first" / f), testing_support::read_text(dir / "second" / f)) << f;
  }
}

TEST(Cli, ReplayRefusesChangedInputs) {
  const auto dir = testing_support::temp_dir("cli_replay2");
  std::string pts = "ri_v,nondim_rate\n-1,0.3\n0,0.2\n0.5,0.25\n1,0.3\n";
  testing_support::write_text(dir / "pts.csv", pts);
  ASSERT_EQ(run({"fit-richardson", "--points", (dir / "pts.csv").string(), "--out", (dir / "a").string()}), 0);
  testing_support::write_text(dir / "pts.csv", pts + "2,0.4\n");
  EXPECT_EQ(run({"replay", "--manifest", (dir / "a" / "manifest.json").string(), "--out", (dir / "b").string()}), 1);
}
