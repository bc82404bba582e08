#pragma once

#include <string>

#include "ventsim/errors.hpp"

namespace ventsim {

/// Fixed physical constants. Not configurable.
struct PhysicalConstants {
  static constexpr double g = 9.81;                 // m/s^2
  static constexpr double sigma = 5.670374419e-8;   // W/(m^2 K^4)
};

inline constexpr double kZeroCelsiusK = 273.15;
inline constexpr double kSecondsPerHour = 3600.0;
inline constexpr double kSecondsPerDay = 86400.0;

// Temperatures crossing a module boundary must lie in this band; anything
// outside is treated as a unit mix-up (Celsius passed as kelvin, etc).
inline constexpr double kMinPlausibleK = 150.0;
inline constexpr double kMaxPlausibleK = 400.0;

constexpr double celsius_to_kelvin(double c) noexcept { return c + kZeroCelsiusK; }
constexpr double kelvin_to_celsius(double k) noexcept { return k - kZeroCelsiusK; }

constexpr bool is_plausible_temperature(double kelvin) noexcept {
  return kelvin >= kMinPlausibleK && kelvin <= kMaxPlausibleK;
}

inline void require_plausible_temperature(double kelvin, const std::string& field) {
  if (!is_plausible_temperature(kelvin)) {
    throw ValidationError(field, "temperature " + std::to_string(kelvin) +
                                     " K outside [150, 400] K (unit error?)");
  }
}

}  // namespace ventsim
