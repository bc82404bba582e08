#include <gtest/gtest.h>

#include <cmath>
#include <random>

#include "support.hpp"
#include "ventsim/vent.hpp"

using namespace ventsim;

namespace {

OpeningSpec opening(OpeningName name, double w, double h, double mid, double cd = 0.61) {
  return OpeningSpec{name, w, h, w * h, mid, cd};
}

// Two unit openings two metres apart: A_eff = 0.61, dH = 2.
VentilationConfig unit_pair() {
  return make_ventilation_config("unit", opening(OpeningName::window, 1.0, 1.0, 1.0),
                                 opening(OpeningName::roof_vent, 1.0, 1.0, 3.0));
}

DrivingState state(double t_mean, double dt, double u) { return {t_mean - 0.5 * dt, t_mean + 0.5 * dt, u}; }

void expect_rel(double got, double want, double rel) { EXPECT_NEAR(got, want, rel * std::abs(want)) << want; }

}  // namespace

TEST(EffectiveArea, EqualOpeningsReduceToDischargeTimesArea) {
  expect_rel(effective_area(1.0, 1.0, 0.61, 0.61), 0.61, 1e-12);
}

TEST(EffectiveArea, ClosedOpeningGivesZero) {
  EXPECT_EQ(effective_area(0.0, 1.0, 0.61, 0.61), 0.0);
  EXPECT_EQ(effective_area(1.0, 0.0, 0.61, 0.61), 0.0);
}

TEST(EffectiveArea, LargeSecondOpeningLimit) {
  const double limit = std::sqrt(2.0) * 0.61;
  expect_rel(effective_area(1.0, 1e6, 0.61, 0.61), limit, 1e-3);
  EXPECT_NEAR(limit, 0.8627, 5e-5);
}

TEST(EffectiveArea, BadDischargeCoefficientIsAnError) {
  EXPECT_THROW(effective_area(1.0, 1.0, 0.0, 0.61), ValidationError);
  EXPECT_THROW(effective_area(1.0, 1.0, 0.61, 1.2), ValidationError);
  EXPECT_THROW(effective_area(-1.0, 1.0, 0.61, 0.61), ValidationError);
}

TEST(CrossRate, NoDrivingForceGivesZero) {
  EXPECT_EQ(cross_ventilation_rate(state(300.0, 0.0, 0.0), unit_pair(), 0.5), 0.0);
}

TEST(CrossRate, BuoyancyOnlyHandValue) {
  const double oracle = 0.61 * std::sqrt(9.81 * 2.0 * 10.0 / 300.0);
  expect_rel(cross_ventilation_rate(state(300.0, 10.0, 0.0), unit_pair(), 0.5), oracle, 1e-6);
  EXPECT_NEAR(oracle, 0.4933, 5e-5);
}

TEST(CrossRate, WindOnlyHandValue) {
  expect_rel(cross_ventilation_rate(state(300.0, 0.0, 2.0), unit_pair(), 0.5), 0.61, 1e-6);
}

TEST(CrossRate, AssistingNotBelowOpposingProperty) {
  std::mt19937_64 rng(3);
  std::uniform_real_distribution<double> u(0.0, 1.0);
  const auto cfg = unit_pair();
  for (int i = 0; i < 2000; ++i) {
    const auto s = state(280.0 + 40.0 * u(rng), 15.0 * u(rng), 0.01 + 8.0 * u(rng));  // dT * dH >= 0
    ASSERT_GE(cross_ventilation_rate(s, cfg, 0.5), cross_ventilation_rate(s, cfg, -0.5));
  }
}

TEST(CrossRate, MonotoneInDrivingMagnitudeProperty) {
  const auto cfg = unit_pair();
  double prev = -1.0;
  for (double u = 0.0; u <= 10.0; u += 0.25) {
    const double r = cross_ventilation_rate(state(300.0, 5.0, u), cfg, 0.5);
    ASSERT_GE(r, prev);
    prev = r;
  }
}

TEST(SingleSided, TurbulenceFloor) {
  expect_rel(single_sided_rate(opening(OpeningName::window, 1.0, 1.0, 1.0), state(300.0, 0.0, 0.0)), 0.05, 1e-12);
}

TEST(SingleSided, HandValue) {
  const double oracle = 0.5 * std::sqrt(0.001 * 4.0 + 0.035 * 1.0 * 5.0 + 0.01);
  expect_rel(single_sided_rate(opening(OpeningName::window, 1.0, 1.0, 1.0), state(300.0, 5.0, 2.0)), oracle, 1e-6);
  expect_rel(single_sided_rate(opening(OpeningName::window, 1.0, 1.0, 1.0), state(300.0, -5.0, 2.0)), oracle, 1e-12);
  EXPECT_NEAR(oracle, 0.21737, 5e-6);
}

TEST(SingleSided, LinearInArea) {
  const auto s = state(300.0, 4.0, 1.5);
  // Same height, double width: the buoyancy term is unchanged, the area doubles.
  expect_rel(single_sided_rate(opening(OpeningName::window, 2.0, 1.0, 1.0), s),
             2.0 * single_sided_rate(opening(OpeningName::window, 1.0, 1.0, 1.0), s), 1e-14);
}

TEST(SingleSided, SurveyedSkylightAndFloorVent) {
  const auto s = testing_support::scenario();
  const auto& cfg = s.configuration("skylight_floor_vent");
  const double rate = combined_single_sided(cfg, state(300.0, 0.0, 0.0));
  expect_rel(rate, 0.05 * (0.48 * 1.75 + 0.09 * 0.11), 1e-12);
  EXPECT_NEAR(rate, 0.0425, 5e-5);
}

TEST(SingleSided, TwoIdenticalOpeningsDouble) {
  const auto a = opening(OpeningName::window, 0.7, 0.9, 1.0);
  auto b = a;
  b.name = OpeningName::skylight;
  const auto cfg = make_ventilation_config("twin", a, b);
  const auto s = state(295.0, 3.0, 1.0);
  EXPECT_DOUBLE_EQ(combined_single_sided(cfg, s), 2.0 * single_sided_rate(a, s));
}

TEST(SingleSided, MonotoneAndPositiveProperty) {
  std::mt19937_64 rng(8);
  std::uniform_real_distribution<double> u(0.0, 1.0);
  for (int i = 0; i < 2000; ++i) {
    const auto o = opening(OpeningName::window, 0.05 + u(rng), 0.05 + 2.0 * u(rng), 1.0);
    const double t = 280.0 + 30.0 * u(rng);
    const double dt = 10.0 * u(rng);
    const double w = 5.0 * u(rng);
    const double base = single_sided_rate(o, state(t, dt, w));
    ASSERT_GT(base, 0.0);
    ASSERT_GE(single_sided_rate(o, state(t, dt, w + 0.5)), base);
    ASSERT_GE(single_sided_rate(o, state(t, dt + 0.5, w)), base);
  }
}

TEST(Richardson, HandValueAndWindScaling) {
  const auto s = state(300.0, 3.0, 1.0);
  const auto ri = richardson_number(s, 2.5);
  expect_rel(ri.value, 9.81 * 0.01 * 2.5, 1e-12);
  EXPECT_NEAR(ri.value, 0.24525, 1e-12);
  EXPECT_FALSE(ri.wind_clamped);
  expect_rel(richardson_number(state(300.0, 3.0, 10.0), 2.5).value, ri.value / 100.0, 1e-12);
  EXPECT_EQ(richardson_number(state(300.0, 0.0, 1.0), 2.5).value, 0.0);
}

TEST(Richardson, CalmWindIsClampedAndFlagged) {
  const auto ri = richardson_number(state(300.0, 3.0, 0.0), 2.5);
  EXPECT_TRUE(ri.wind_clamped);
  expect_rel(ri.value, 9.81 * 0.01 * 2.5 / (0.05 * 0.05), 1e-12);
}

TEST(RichardsonFitRate, BalancePointGivesTurbulentTerm) {
  const RichardsonCoefficients c{0.08, 0.02, 0.05};
  EXPECT_DOUBLE_EQ(richardson_nondim_rate(c, -c.c2 / c.c1), c.c3);
}

TEST(RichardsonFitRate, DirectSubstitution) {
  const RichardsonCoefficients c{1.0, 0.0, 0.0};
  EXPECT_DOUBLE_EQ(richardson_nondim_rate(c, 4.0), 2.0);
  // Build a state with Ri = 4 for h = 1, U = 1 and a unit total area.
  const auto cfg = make_ventilation_config("half", opening(OpeningName::window, 0.5, 1.0, 1.0),
                                           opening(OpeningName::roof_vent, 0.5, 1.0, 2.0));
  const double tm = 300.0;
  const double dt = 4.0 * tm / 9.81;
  const auto s = state(tm, dt, 1.0);
  EXPECT_NEAR(richardson_fit_rate(c, cfg, s, 1.0), 2.0, 1e-12);
}

TEST(RichardsonFitRate, ScalesWithAreaTimesWindAtFixedRi) {
  const RichardsonCoefficients c{0.08, 0.02, 0.05};
  const auto small = unit_pair();
  const auto big = make_ventilation_config("big", opening(OpeningName::window, 2.0, 1.0, 1.0),
                                           opening(OpeningName::roof_vent, 2.0, 1.0, 3.0));
  // Same Ri: double U and quadruple dT.
  const auto s1 = state(300.0, 1.0, 1.0);
  const auto s2 = state(300.0, 4.0, 2.0);
  expect_rel(richardson_number(s2, 2.0).value, richardson_number(s1, 2.0).value, 1e-12);
  expect_rel(richardson_fit_rate(c, big, s2, 2.0), 4.0 * richardson_fit_rate(c, small, s1, 2.0), 1e-12);
}

TEST(VentilationModel, DispatchMatchesFreeFunctions) {
  const auto s = testing_support::scenario();
  const auto& cfg = s.ventilation;
  const auto d = state(301.0, 2.0, 1.3);
  EXPECT_DOUBLE_EQ(VentilationModel(VentModelKind::CrossAssisting, cfg, 2.42)(d), cross_ventilation_rate(d, cfg, 0.5));
  EXPECT_DOUBLE_EQ(VentilationModel(VentModelKind::CrossOpposing, cfg, 2.42)(d), cross_ventilation_rate(d, cfg, -0.5));
  EXPECT_DOUBLE_EQ(VentilationModel(VentModelKind::SingleSided, cfg, 2.42)(d), combined_single_sided(cfg, d));
  EXPECT_THROW(VentilationModel(VentModelKind::RichardsonFit, cfg, 2.42), ValidationError);
}

TEST(VentilationModel, AllRatesNonNegativeProperty) {
  const auto s = testing_support::scenario();
  std::mt19937_64 rng(17);
  std::uniform_real_distribution<double> u(0.0, 1.0);
  const RichardsonCoefficients c{-0.3, 0.1, 0.0};
  for (auto kind : {VentModelKind::CrossAssisting, VentModelKind::CrossOpposing, VentModelKind::SingleSided,
                    VentModelKind::RichardsonFit}) {
    const VentilationModel m(kind, s.ventilation, 2.42, c);
    for (int i = 0; i < 1000; ++i) {
      ASSERT_GE(m(state(270.0 + 50.0 * u(rng), 20.0 * (u(rng) - 0.5), 10.0 * u(rng))), 0.0);
    }
  }
}

TEST(ModelSelection, EnsembleIsExactlyThreeMembers) {
  const auto e = parse_model_selection("ensemble");
  ASSERT_EQ(e.size(), 3u);
  EXPECT_EQ(e[0], VentModelKind::CrossAssisting);
  EXPECT_EQ(e[1], VentModelKind::CrossOpposing);
  EXPECT_EQ(e[2], VentModelKind::SingleSided);
  EXPECT_EQ(parse_model_selection("richardson").size(), 1u);
  EXPECT_THROW(parse_model_selection("single,single"), ValidationError);
  EXPECT_THROW(parse_model_selection("bogus"), ValidationError);
}
