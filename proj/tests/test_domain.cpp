#include <gtest/gtest.h>

#include "support.hpp"
#include "ventsim/domain.hpp"
#include "ventsim/units.hpp"

using namespace ventsim;
using testing_support::scenario_json;

namespace {

std::string field_of(const nlohmann::json& doc) {
  try {
    validate_scenario(doc);
  } catch (const ValidationError& e) {
    return e.field();
  }
  return "<no error>";
}

}  // namespace

TEST(Domain, AirVolumeOfTheSurveyedHouse) {
  const auto s = validate_scenario(scenario_json());
  // Volume by hand: footprint times mean ceiling height.
  const double expected = 3.14 * 2.34 * (2.51 + 2.33) / 2.0;
  EXPECT_NEAR(s.geometry.air_volume, expected, 1e-12);
  EXPECT_NEAR(s.geometry.air_volume, 17.78, 0.005);
  EXPECT_DOUBLE_EQ(s.geometry.reference_height, 2.42);
}

TEST(Domain, ExampleScenarioLoads) {
  const auto s = load_scenario(testing_support::data_path("example_scenario.json"));
  EXPECT_EQ(s.configurations.size(), 4u);
  EXPECT_EQ(s.ventilation.name, "window_roof_vent");
  EXPECT_TRUE(s.floor_from_outdoor_mean);
  ASSERT_TRUE(s.wind_correction);
  EXPECT_DOUBLE_EQ(s.wind_correction->measurement_height, 10.0);
}

TEST(Domain, DerivedOpeningAndConfigurationFields) {
  const auto s = validate_scenario(scenario_json());
  const auto& c = s.configuration("window_roof_vent");
  EXPECT_NEAR(c.opening_a.area, 0.68 * 0.91, 1e-15);
  EXPECT_NEAR(c.delta_h, 1.0, 1e-12);
  EXPECT_NEAR(c.total_area, 0.68 * 0.91 + 0.60 * 0.41, 1e-15);
  EXPECT_DOUBLE_EQ(c.opening_a.discharge_coefficient, 0.61);
}

TEST(Domain, ZeroOpeningWidthIsRejectedWithFieldPath) {
  auto doc = scenario_json();
  doc["openings"][2]["width_m"] = 0.0;
  EXPECT_EQ(field_of(doc), "openings[2].width_m");
}

TEST(Domain, EqualMidHeightsGiveZeroDeltaH) {
  auto doc = scenario_json();
  doc["openings"][0]["mid_height_m"] = 1.2;  // skylight level with the window
  doc["ventilation"]["configurations"].push_back({{"name", "level"}, {"openings", {"skylight", "window"}}});
  const auto s = validate_scenario(doc);
  EXPECT_EQ(s.configuration("level").delta_h, 0.0);
}

TEST(Domain, MissingFieldsAreReportedByPath) {
  auto doc = scenario_json();
  doc["masses"][1].erase("conductivity_wmk");
  EXPECT_EQ(field_of(doc), "masses[1].conductivity_wmk");

  doc = scenario_json();
  doc["geometry"].erase("height_south_m");
  EXPECT_EQ(field_of(doc), "geometry.height_south_m");
}

TEST(Domain, FloorNeedsConstantTemperature) {
  auto doc = scenario_json();
  doc["masses"][5].erase("constant_temperature_c");
  EXPECT_EQ(field_of(doc), "masses[5].constant_temperature_c");
}

TEST(Domain, DuplicateOpeningInConfigurationIsRejected) {
  auto doc = scenario_json();
  doc["ventilation"]["configurations"][0]["openings"] = {"window", "window"};
  EXPECT_EQ(field_of(doc), "ventilation.configurations[0].openings");
}

TEST(Domain, ExactlyOneAdiabaticWall) {
  auto doc = scenario_json();
  doc["masses"][1]["adiabatic"] = true;
  EXPECT_EQ(field_of(doc), "masses");
  doc = scenario_json();
  doc["masses"][4]["adiabatic"] = false;
  EXPECT_EQ(field_of(doc), "masses");
}

TEST(Domain, ImplausibleTemperatureIsAUnitError) {
  // 300 entered as Celsius by mistake: 573 K is outside the plausible band.
  auto doc = scenario_json(300.0);
  EXPECT_EQ(field_of(doc), "masses[5].constant_temperature_c");
  EXPECT_THROW(require_plausible_temperature(149.0, "t"), ValidationError);
  EXPECT_NO_THROW(require_plausible_temperature(300.0, "t"));
}

TEST(Domain, RevalidationIsIdempotent) {
  const auto s1 = validate_scenario(scenario_json());
  const auto s2 = validate_scenario(scenario_to_json(s1));
  EXPECT_EQ(s1.geometry, s2.geometry);
  EXPECT_EQ(s1.masses, s2.masses);
  EXPECT_EQ(s1.openings, s2.openings);
  EXPECT_EQ(s1.configurations, s2.configurations);
  EXPECT_EQ(s1.ventilation, s2.ventilation);
  EXPECT_EQ(s1.hash, s2.hash);
}

TEST(Domain, RangeOverridesAreValidated) {
  auto doc = scenario_json();
  doc["uq"]["ranges"]["h_in"] = {2.0, 3.0};
  const auto s = validate_scenario(doc);
  EXPECT_EQ(s.ranges[Parameter::h_in], (Range{2.0, 3.0}));
  ASSERT_EQ(s.ranges.overridden().size(), 1u);

  doc["uq"]["ranges"]["p_wind"] = {0.2, 1.5};
  EXPECT_EQ(field_of(doc), "uq.ranges.p_wind");
  doc["uq"]["ranges"].erase("p_wind");
  doc["uq"]["ranges"]["h_sky"] = {0.0, 1.0};
  EXPECT_EQ(field_of(doc), "uq.ranges.h_sky");
}

TEST(Domain, OutdoorMeanFloorIsResolvedLater) {
  auto doc = scenario_json();
  doc["masses"][5]["constant_temperature_c"] = "outdoor_mean";
  const auto s = validate_scenario(doc);
  EXPECT_FALSE(s.floor().constant_temperature);
  const auto r = resolve_floor_temperature(s, 301.5);
  EXPECT_DOUBLE_EQ(*r.floor().constant_temperature, 301.5);
  EXPECT_NE(r.hash, s.hash);
}

TEST(Domain, MalformedDocumentReportsLine) {
  const auto dir = testing_support::temp_dir("domain");
  const auto p = dir / "bad.json";
  testing_support::write_text(p, "{\n  \"geometry\": {\n    \"floor_length_m\": ,\n  }\n}\n");
  try {
    load_scenario(p.string());
    FAIL() << "expected InputError";
  } catch (const InputError& e) {
    EXPECT_EQ(e.line(), 3u);
  }
  EXPECT_THROW(load_scenario((dir / "missing.json").string()), InputError);
}
