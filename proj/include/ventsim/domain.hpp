#pragma once

// Physical configuration of the dwelling: geometry, thermal masses, openings
// and ventilation configurations. Everything here is immutable once
// validate_scenario() has returned, so instances are freely shared between
// worker threads.
//
// Scenario documents are JSON. Lengths are metres, temperatures in the
// document are Celsius and converted to kelvin on load.

#include <algorithm>
#include <array>
#include <cmath>
#include <cstdint>
#include <fstream>
#include <iterator>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include <nlohmann/json.hpp>

#include "ventsim/errors.hpp"
#include "ventsim/hash.hpp"
#include "ventsim/parameters.hpp"
#include "ventsim/units.hpp"

namespace ventsim {

enum class MassName { roof, wall_n, wall_s, wall_e, wall_w, floor };
enum class OpeningName { skylight, roof_vent, floor_vent, window };

constexpr std::string_view to_string(MassName n) noexcept {
  switch (n) {
    case MassName::roof: return "roof";
    case MassName::wall_n: return "wall_n";
    case MassName::wall_s: return "wall_s";
    case MassName::wall_e: return "wall_e";
    case MassName::wall_w: return "wall_w";
    case MassName::floor: return "floor";
  }
  return "?";
}

constexpr std::string_view to_string(OpeningName n) noexcept {
  switch (n) {
    case OpeningName::skylight: return "skylight";
    case OpeningName::roof_vent: return "roof_vent";
    case OpeningName::floor_vent: return "floor_vent";
    case OpeningName::window: return "window";
  }
  return "?";
}

inline std::optional<MassName> parse_mass_name(std::string_view s) {
  for (auto n : {MassName::roof, MassName::wall_n, MassName::wall_s, MassName::wall_e,
                 MassName::wall_w, MassName::floor}) {
    if (to_string(n) == s) return n;
  }
  return std::nullopt;
}

inline std::optional<OpeningName> parse_opening_name(std::string_view s) {
  for (auto n : {OpeningName::skylight, OpeningName::roof_vent, OpeningName::floor_vent,
                 OpeningName::window}) {
    if (to_string(n) == s) return n;
  }
  return std::nullopt;
}

struct HouseGeometry {
  double floor_length = 0.0;
  double floor_width = 0.0;
  double height_north = 0.0;
  double height_south = 0.0;
  double reference_height = 0.0;  // roof height for wind and the Richardson number
  double air_volume = 0.0;        // derived

  double footprint() const noexcept { return floor_length * floor_width; }
  double mean_height() const noexcept { return 0.5 * (height_north + height_south); }
  bool operator==(const HouseGeometry&) const = default;
};

struct ThermalMassSpec {
  MassName name = MassName::roof;
  double area = 0.0;           // m^2
  double thickness = 0.0;      // m
  double density = 0.0;        // kg/m^3
  double specific_heat = 0.0;  // J/(kg K)
  double conductivity = 0.0;   // W/(m K)
  double emissivity_indoor = 0.0;
  bool adiabatic = false;
  std::optional<double> constant_temperature;  // K, floor only

  /// Conductance of one half-layer, k A / (t/2), W/K.
  double half_layer_conductance() const noexcept { return conductivity * area / (0.5 * thickness); }
  /// rho V c_p, J/K.
  double heat_capacity() const noexcept { return density * area * thickness * specific_heat; }
  bool is_floor() const noexcept { return name == MassName::floor; }

  bool operator==(const ThermalMassSpec&) const = default;
};

struct OpeningSpec {
  OpeningName name = OpeningName::window;
  double width = 0.0;
  double height = 0.0;
  double area = 0.0;  // derived
  double mid_height = 0.0;
  double discharge_coefficient = 0.61;

  bool operator==(const OpeningSpec&) const = default;
};

/// A pair of open openings.
struct VentilationConfig {
  std::string name;
  OpeningSpec opening_a;
  OpeningSpec opening_b;
  double delta_h = 0.0;     // derived, |mid height difference|
  double total_area = 0.0;  // derived

  bool operator==(const VentilationConfig&) const = default;
};

struct AirProperties {
  double density = 1.18;         // kg/m^3
  double specific_heat = 1005.0; // J/(kg K)

  double volumetric_heat_capacity() const noexcept { return density * specific_heat; }
  bool operator==(const AirProperties&) const = default;
};

/// Power-law correction of measured wind speed to the house reference height.
struct WindHeightCorrection {
  double measurement_height = 10.0;
  double exponent = 0.25;
  bool operator==(const WindHeightCorrection&) const = default;
};

struct ScenarioConfig {
  HouseGeometry geometry;
  AirProperties air;
  std::vector<ThermalMassSpec> masses;
  std::vector<OpeningSpec> openings;
  std::vector<VentilationConfig> configurations;
  VentilationConfig ventilation;  // active configuration
  bool floor_from_outdoor_mean = false;
  std::optional<WindHeightCorrection> wind_correction;
  ParameterRanges ranges;
  std::uint64_t hash = 0;  // FNV-1a of the canonical document

  const ThermalMassSpec& floor() const {
    for (const auto& m : masses) {
      if (m.is_floor()) return m;
    }
    throw ValidationError("masses", "no floor");
  }

  const ThermalMassSpec* find_mass(MassName n) const noexcept {
    for (const auto& m : masses) {
      if (m.name == n) return &m;
    }
    return nullptr;
  }

  const VentilationConfig& configuration(std::string_view name) const {
    for (const auto& c : configurations) {
      if (c.name == name) return c;
    }
    throw ValidationError("ventilation.configurations", "unknown configuration '" + std::string(name) + "'");
  }

  bool operator==(const ScenarioConfig&) const = default;
};

inline VentilationConfig make_ventilation_config(std::string name, const OpeningSpec& a,
                                                 const OpeningSpec& b) {
  if (a.name == b.name) {
    throw ValidationError("ventilation", "configuration '" + name + "' uses opening '" +
                                             std::string(to_string(a.name)) + "' twice");
  }
  VentilationConfig cfg;
  cfg.name = std::move(name);
  cfg.opening_a = a;
  cfg.opening_b = b;
  cfg.delta_h = std::abs(a.mid_height - b.mid_height);
  cfg.total_area = a.area + b.area;
  return cfg;
}

namespace detail {

using nlohmann::json;

class DocReader {
 public:
  DocReader(const json& node, std::string path) : node_(node), path_(std::move(path)) {
    if (!node_.is_object()) throw ValidationError(path_, "expected an object");
  }

  std::string child(std::string_view key) const {
    return path_.empty() ? std::string(key) : path_ + "." + std::string(key);
  }

  bool has(std::string_view key) const { return node_.contains(std::string(key)); }

  const json& at(std::string_view key) const {
    auto it = node_.find(std::string(key));
    if (it == node_.end()) throw ValidationError(child(key), "missing field");
    return *it;
  }

  double number(std::string_view key) const {
    const json& v = at(key);
    if (!v.is_number()) throw ValidationError(child(key), "expected a number");
    const double x = v.get<double>();
    if (!std::isfinite(x)) throw ValidationError(child(key), "must be finite");
    return x;
  }

  double positive(std::string_view key) const {
    const double x = number(key);
    if (!(x > 0.0)) throw ValidationError(child(key), "must be > 0");
    return x;
  }

  double number_or(std::string_view key, double fallback) const {
    return has(key) ? number(key) : fallback;
  }

  std::string string(std::string_view key) const {
    const json& v = at(key);
    if (!v.is_string()) throw ValidationError(child(key), "expected a string");
    return v.get<std::string>();
  }

  bool boolean_or(std::string_view key, bool fallback) const {
    if (!has(key)) return fallback;
    const json& v = at(key);
    if (!v.is_boolean()) throw ValidationError(child(key), "expected true or false");
    return v.get<bool>();
  }

  const std::string& path() const noexcept { return path_; }

 private:
  const json& node_;
  std::string path_;
};

inline void require_unit_interval(double x, const std::string& field) {
  if (x < 0.0 || x > 1.0) throw ValidationError(field, "must lie within [0, 1]");
}

}  // namespace detail

/// Canonical JSON form of a validated scenario. Feeding it back through
/// validate_scenario() yields an equal ScenarioConfig.
inline nlohmann::json scenario_to_json(const ScenarioConfig& s) {
  using nlohmann::json;
  json doc;
  doc["geometry"] = {{"floor_length_m", s.geometry.floor_length},
                     {"floor_width_m", s.geometry.floor_width},
                     {"height_north_m", s.geometry.height_north},
                     {"height_south_m", s.geometry.height_south},
                     {"reference_height_m", s.geometry.reference_height}};
  doc["air"] = {{"density_kgm3", s.air.density}, {"specific_heat_jkgk", s.air.specific_heat}};
  json masses = json::array();
  for (const auto& m : s.masses) {
    json j = {{"name", to_string(m.name)}, {"area_m2", m.area}};
    if (m.is_floor()) {
      if (s.floor_from_outdoor_mean && !m.constant_temperature) {
        j["constant_temperature_c"] = "outdoor_mean";
      } else if (m.constant_temperature) {
        j["constant_temperature_c"] = kelvin_to_celsius(*m.constant_temperature);
      }
    }
    if (m.thickness > 0) j["thickness_m"] = m.thickness;
    if (m.density > 0) j["density_kgm3"] = m.density;
    if (m.specific_heat > 0) j["specific_heat_jkgk"] = m.specific_heat;
    if (m.conductivity > 0) j["conductivity_wmk"] = m.conductivity;
    if (!m.is_floor()) j["emissivity_indoor"] = m.emissivity_indoor;
    if (m.adiabatic) j["adiabatic"] = true;
    masses.push_back(std::move(j));
  }
  doc["masses"] = std::move(masses);
  json openings = json::array();
  for (const auto& o : s.openings) {
    openings.push_back({{"name", to_string(o.name)},
                        {"width_m", o.width},
                        {"height_m", o.height},
                        {"mid_height_m", o.mid_height},
                        {"discharge_coefficient", o.discharge_coefficient}});
  }
  doc["openings"] = std::move(openings);
  json configs = json::array();
  for (const auto& c : s.configurations) {
    configs.push_back({{"name", c.name},
                       {"openings", {to_string(c.opening_a.name), to_string(c.opening_b.name)}}});
  }
  doc["ventilation"] = {{"active", s.ventilation.name}, {"configurations", std::move(configs)}};
  if (s.wind_correction) {
    doc["weather"] = {{"anemometer_height_m", s.wind_correction->measurement_height},
                      {"wind_exponent", s.wind_correction->exponent}};
  }
  const auto overridden = s.ranges.overridden();
  if (!overridden.empty()) {
    json ranges;
    for (auto p : overridden) ranges[std::string(to_string(p))] = {s.ranges[p].lo, s.ranges[p].hi};
    doc["uq"] = {{"ranges", std::move(ranges)}};
  }
  return doc;
}

/// Validate a parsed scenario document and compute every derived field.
/// Errors name the offending field path.
inline ScenarioConfig validate_scenario(const nlohmann::json& doc) {
  using detail::DocReader;
  ScenarioConfig s;
  const DocReader root(doc, "");

  {
    const DocReader g(root.at("geometry"), "geometry");
    s.geometry.floor_length = g.positive("floor_length_m");
    s.geometry.floor_width = g.positive("floor_width_m");
    s.geometry.height_north = g.positive("height_north_m");
    s.geometry.height_south = g.positive("height_south_m");
    s.geometry.reference_height =
        g.has("reference_height_m") ? g.positive("reference_height_m") : s.geometry.mean_height();
    s.geometry.air_volume = s.geometry.footprint() * s.geometry.mean_height();
  }

  if (root.has("air")) {
    const DocReader a(root.at("air"), "air");
    s.air.density = a.has("density_kgm3") ? a.positive("density_kgm3") : s.air.density;
    s.air.specific_heat =
        a.has("specific_heat_jkgk") ? a.positive("specific_heat_jkgk") : s.air.specific_heat;
  }

  const auto& masses = root.at("masses");
  if (!masses.is_array() || masses.empty()) throw ValidationError("masses", "expected a non-empty array");
  int adiabatic_count = 0;
  for (std::size_t i = 0; i < masses.size(); ++i) {
    const DocReader m(masses[i], "masses[" + std::to_string(i) + "]");
    ThermalMassSpec spec;
    const auto name = parse_mass_name(m.string("name"));
    if (!name) throw ValidationError(m.child("name"), "expected roof, wall_n, wall_s, wall_e, wall_w or floor");
    if (s.find_mass(*name)) throw ValidationError(m.child("name"), "duplicate thermal mass");
    spec.name = *name;
    spec.area = m.positive("area_m2");
    spec.adiabatic = m.boolean_or("adiabatic", false);
    if (spec.is_floor()) {
      if (spec.adiabatic) throw ValidationError(m.child("adiabatic"), "the floor cannot be adiabatic");
      if (!m.has("constant_temperature_c")) {
        throw ValidationError(m.child("constant_temperature_c"), "floor lacks a constant temperature");
      }
      const auto& t = m.at("constant_temperature_c");
      if (t.is_string() && t.get<std::string>() == "outdoor_mean") {
        s.floor_from_outdoor_mean = true;
      } else {
        spec.constant_temperature = celsius_to_kelvin(m.number("constant_temperature_c"));
        require_plausible_temperature(*spec.constant_temperature, m.child("constant_temperature_c"));
      }
      // Material data is unused for a fixed-temperature floor but checked if given.
      for (auto key : {"thickness_m", "density_kgm3", "specific_heat_jkgk", "conductivity_wmk"}) {
        if (m.has(key)) m.positive(key);
      }
      spec.thickness = m.number_or("thickness_m", 0.0);
      spec.density = m.number_or("density_kgm3", 0.0);
      spec.specific_heat = m.number_or("specific_heat_jkgk", 0.0);
      spec.conductivity = m.number_or("conductivity_wmk", 0.0);
    } else {
      if (m.has("constant_temperature_c")) {
        throw ValidationError(m.child("constant_temperature_c"), "only the floor has a constant temperature");
      }
      spec.thickness = m.positive("thickness_m");
      spec.density = m.positive("density_kgm3");
      spec.specific_heat = m.positive("specific_heat_jkgk");
      spec.conductivity = m.positive("conductivity_wmk");
      spec.emissivity_indoor = m.number_or("emissivity_indoor", 0.9);
      detail::require_unit_interval(spec.emissivity_indoor, m.child("emissivity_indoor"));
      if (spec.adiabatic) {
        if (spec.name == MassName::roof) throw ValidationError(m.child("adiabatic"), "the roof cannot be adiabatic");
        ++adiabatic_count;
      }
    }
    s.masses.push_back(spec);
  }
  if (!s.find_mass(MassName::roof)) throw ValidationError("masses", "a roof is required");
  if (!s.find_mass(MassName::floor)) throw ValidationError("masses", "a floor is required");
  if (adiabatic_count != 1) {
    throw ValidationError("masses", "exactly one wall must be flagged adiabatic (found " +
                                        std::to_string(adiabatic_count) + ")");
  }

  const auto& openings = root.at("openings");
  if (!openings.is_array() || openings.empty()) throw ValidationError("openings", "expected a non-empty array");
  for (std::size_t i = 0; i < openings.size(); ++i) {
    const DocReader o(openings[i], "openings[" + std::to_string(i) + "]");
    OpeningSpec spec;
    const auto name = parse_opening_name(o.string("name"));
    if (!name) throw ValidationError(o.child("name"), "expected skylight, roof_vent, floor_vent or window");
    for (const auto& prev : s.openings) {
      if (prev.name == *name) throw ValidationError(o.child("name"), "duplicate opening");
    }
    spec.name = *name;
    spec.width = o.positive("width_m");
    spec.height = o.positive("height_m");
    spec.area = spec.width * spec.height;
    spec.mid_height = o.number("mid_height_m");
    if (spec.mid_height < 0.0) throw ValidationError(o.child("mid_height_m"), "must be >= 0");
    spec.discharge_coefficient = o.number_or("discharge_coefficient", 0.61);
    if (!(spec.discharge_coefficient > 0.0 && spec.discharge_coefficient <= 1.0)) {
      throw ValidationError(o.child("discharge_coefficient"), "must lie within (0, 1]");
    }
    s.openings.push_back(spec);
  }

  {
    const DocReader v(root.at("ventilation"), "ventilation");
    const auto& configs = v.at("configurations");
    if (!configs.is_array() || configs.empty()) {
      throw ValidationError(v.child("configurations"), "expected a non-empty array");
    }
    for (std::size_t i = 0; i < configs.size(); ++i) {
      const DocReader c(configs[i], v.child("configurations") + "[" + std::to_string(i) + "]");
      const std::string name = c.string("name");
      for (const auto& prev : s.configurations) {
        if (prev.name == name) throw ValidationError(c.child("name"), "duplicate configuration name");
      }
      const auto& pair = c.at("openings");
      if (!pair.is_array() || pair.size() != 2 || !pair[0].is_string() || !pair[1].is_string()) {
        throw ValidationError(c.child("openings"), "expected two opening names");
      }
      std::array<const OpeningSpec*, 2> found{nullptr, nullptr};
      for (std::size_t k = 0; k < 2; ++k) {
        const auto oname = parse_opening_name(pair[k].get<std::string>());
        for (const auto& o : s.openings) {
          if (oname && o.name == *oname) found[k] = &o;
        }
        if (!found[k]) {
          throw ValidationError(c.child("openings") + "[" + std::to_string(k) + "]",
                                "opening '" + pair[k].get<std::string>() + "' is not defined");
        }
      }
      if (found[0]->name == found[1]->name) {
        throw ValidationError(c.child("openings"), "duplicate opening in a configuration");
      }
      s.configurations.push_back(make_ventilation_config(name, *found[0], *found[1]));
    }
    const std::string active = v.has("active") ? v.string("active") : s.configurations.front().name;
    bool ok = false;
    for (const auto& c : s.configurations) {
      if (c.name == active) {
        s.ventilation = c;
        ok = true;
      }
    }
    if (!ok) throw ValidationError(v.child("active"), "unknown configuration '" + active + "'");
  }

  if (root.has("weather")) {
    const DocReader w(root.at("weather"), "weather");
    WindHeightCorrection wc;
    wc.measurement_height = w.positive("anemometer_height_m");
    wc.exponent = w.number_or("wind_exponent", 0.25);
    s.wind_correction = wc;
  }

  if (root.has("uq")) {
    const DocReader uq(root.at("uq"), "uq");
    if (uq.has("ranges")) {
      const auto& ranges = uq.at("ranges");
      if (!ranges.is_object()) throw ValidationError("uq.ranges", "expected an object");
      for (auto it = ranges.begin(); it != ranges.end(); ++it) {
        const std::string field = "uq.ranges." + it.key();
        const Parameter p = [&] {
          try {
            return parse_parameter(it.key());
          } catch (const ValidationError&) {
            throw ValidationError(field, "unknown uncertain parameter");
          }
        }();
        const auto& r = it.value();
        if (!r.is_array() || r.size() != 2 || !r[0].is_number() || !r[1].is_number()) {
          throw ValidationError(field, "expected [lo, hi]");
        }
        s.ranges[p] = Range{r[0].get<double>(), r[1].get<double>()};
      }
      s.ranges.validate();
    }
  }

  s.hash = fnv1a64(scenario_to_json(s).dump());
  return s;
}

/// Copy of the scenario with the floor temperature fixed at `t_floor_k` when
/// the document asked for the outdoor mean. No-op otherwise.
inline ScenarioConfig resolve_floor_temperature(ScenarioConfig s, double outdoor_mean_k) {
  if (!s.floor_from_outdoor_mean) return s;
  require_plausible_temperature(outdoor_mean_k, "masses.floor.constant_temperature_c");
  for (auto& m : s.masses) {
    if (m.is_floor()) m.constant_temperature = outdoor_mean_k;
  }
  s.floor_from_outdoor_mean = false;
  s.hash = fnv1a64(scenario_to_json(s).dump());
  return s;
}

/// Parse and validate a scenario document from disk.
inline ScenarioConfig load_scenario(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw InputError(path, 0, "cannot open scenario file");
  const std::string text{std::istreambuf_iterator<char>(in), std::istreambuf_iterator<char>()};
  nlohmann::json doc;
  try {
    doc = nlohmann::json::parse(text, nullptr, true, true);
  } catch (const nlohmann::json::parse_error& e) {
    const auto upto = std::min<std::size_t>(e.byte, text.size());
    const auto line = 1 + static_cast<std::size_t>(std::count(text.begin(), text.begin() + static_cast<std::ptrdiff_t>(upto), '\n'));
    throw InputError(path, line, "malformed scenario document");
  }
  return validate_scenario(doc);
}

}  // namespace ventsim
