#pragma once

#include <chrono>
#include <filesystem>
#include <fstream>
#include <random>
#include <sstream>
#include <string>

#include <nlohmann/json.hpp>

#include "ventsim/domain.hpp"

namespace testing_support {

inline std::string data_path(const std::string& name) { return std::string(VENTSIM_DATA_DIR) + "/" + name; }

/// Reduced version of the example house with a fixed floor temperature.
inline nlohmann::json scenario_json(double floor_c = 28.0) {
  using nlohmann::json;
  auto brick = [](const char* name, double area) {
    return json{{"name", name},          {"area_m2", area},          {"thickness_m", 0.125},
                {"density_kgm3", 1920},  {"specific_heat_jkgk", 840}, {"conductivity_wmk", 0.72}};
  };
  json west = brick("wall_w", 5.66);
  west["adiabatic"] = true;
  return json{
      {"geometry",
       {{"floor_length_m", 3.14}, {"floor_width_m", 2.34}, {"height_north_m", 2.51}, {"height_south_m", 2.33}}},
      {"masses",
       {json{{"name", "roof"},
             {"area_m2", 7.3476},
             {"thickness_m", 0.0005},
             {"density_kgm3", 7850},
             {"specific_heat_jkgk", 500},
             {"conductivity_wmk", 50},
             {"emissivity_indoor", 0.9}},
        brick("wall_n", 7.88), brick("wall_s", 7.32), brick("wall_e", 5.66), west,
        json{{"name", "floor"}, {"area_m2", 7.3476}, {"constant_temperature_c", floor_c}}}},
      {"openings",
       {json{{"name", "skylight"}, {"width_m", 0.48}, {"height_m", 1.75}, {"mid_height_m", 2.42}},
        json{{"name", "roof_vent"}, {"width_m", 0.60}, {"height_m", 0.41}, {"mid_height_m", 2.20}},
        json{{"name", "floor_vent"}, {"width_m", 0.09}, {"height_m", 0.11}, {"mid_height_m", 0.10}},
        json{{"name", "window"}, {"width_m", 0.68}, {"height_m", 0.91}, {"mid_height_m", 1.20}}}},
      {"ventilation",
       {{"active", "window_roof_vent"},
        {"configurations",
         {json{{"name", "skylight_floor_vent"}, {"openings", {"skylight", "floor_vent"}}},
          json{{"name", "window_roof_vent"}, {"openings", {"window", "roof_vent"}}}}}}}};
}

inline ventsim::ScenarioConfig scenario(double floor_c = 28.0) {
  return ventsim::validate_scenario(scenario_json(floor_c));
}

/// Fresh, empty directory under the system temp dir.
inline std::filesystem::path temp_dir(const std::string& tag) {
  static std::mt19937_64 rng(std::random_device{}());
  auto p = std::filesystem::temp_directory_path() / ("ventsim_" + tag + "_" + std::to_string(rng()));
  std::filesystem::remove_all(p);
  std::filesystem::create_directories(p);
  return p;
}

inline std::string read_text(const std::filesystem::path& p) {
  std::ifstream in(p, std::ios::binary);
  std::ostringstream s;
  s << in.rdbuf();
  return s.str();
}

inline void write_text(const std::filesystem::path& p, const std::string& text) {
  std::ofstream out(p, std::ios::binary);
  out << text;
}

inline double seconds_since(std::chrono::steady_clock::time_point t0) {
  return std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
}

}  // namespace testing_support
