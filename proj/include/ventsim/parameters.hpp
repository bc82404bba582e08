#pragma once

#include <array>
#include <cstddef>
#include <string>
#include <string_view>
#include <vector>

#include "ventsim/errors.hpp"

namespace ventsim {

/// The seven uncertain inputs, in canonical order. Index order is used for
/// Sobol matrices and report rows.
enum class Parameter : std::size_t { h_in, h_out, rho_roof, eps_roof, p_temp, p_rad, p_wind };

inline constexpr std::size_t kParameterCount = 7;

inline constexpr std::array<Parameter, kParameterCount> kAllParameters = {
    Parameter::h_in,   Parameter::h_out, Parameter::rho_roof, Parameter::eps_roof,
    Parameter::p_temp, Parameter::p_rad, Parameter::p_wind};

constexpr std::string_view to_string(Parameter p) noexcept {
  constexpr std::array<std::string_view, kParameterCount> names = {
      "h_in", "h_out", "rho_roof", "eps_roof", "p_temp", "p_rad", "p_wind"};
  return names[static_cast<std::size_t>(p)];
}

inline Parameter parse_parameter(std::string_view name) {
  for (auto p : kAllParameters) {
    if (to_string(p) == name) return p;
  }
  throw ValidationError(std::string(name), "unknown uncertain parameter");
}

/// One draw of the uncertain inputs.
struct ParameterSample {
  double h_in = 2.5;      // W/(m^2 K)
  double h_out = 8.0;     // W/(m^2 K)
  double rho_roof = 0.675;  // roof reflectance
  double eps_roof = 0.85;   // roof emissivity (outdoor side)
  double p_temp = 0.5;
  double p_rad = 0.5;
  double p_wind = 0.5;

  double& operator[](Parameter p) noexcept {
    switch (p) {
      case Parameter::h_in: return h_in;
      case Parameter::h_out: return h_out;
      case Parameter::rho_roof: return rho_roof;
      case Parameter::eps_roof: return eps_roof;
      case Parameter::p_temp: return p_temp;
      case Parameter::p_rad: return p_rad;
      case Parameter::p_wind: return p_wind;
    }
    return p_wind;
  }
  double operator[](Parameter p) const noexcept { return const_cast<ParameterSample&>(*this)[p]; }

  bool operator==(const ParameterSample&) const = default;
};

struct Range {
  double lo = 0.0;
  double hi = 1.0;

  double width() const noexcept { return hi - lo; }
  bool contains(double x) const noexcept { return x >= lo && x <= hi; }
  bool operator==(const Range&) const = default;
};

/// Sampling ranges for every uncertain parameter. Defaults are the reference
/// UQ ranges; probabilities are drawn on the open interval.
struct ParameterRanges {
  std::array<Range, kParameterCount> ranges = {{
      {1.0, 4.0},     // h_in
      {1.0, 15.0},    // h_out
      {0.60, 0.75},   // rho_roof
      {0.80, 0.90},   // eps_roof
      {0.0, 1.0},     // p_temp
      {0.0, 1.0},     // p_rad
      {0.0, 1.0},     // p_wind
  }};

  const Range& operator[](Parameter p) const noexcept { return ranges[static_cast<std::size_t>(p)]; }
  Range& operator[](Parameter p) noexcept { return ranges[static_cast<std::size_t>(p)]; }

  static bool is_probability(Parameter p) noexcept {
    return p == Parameter::p_temp || p == Parameter::p_rad || p == Parameter::p_wind;
  }

  /// Parameters whose range differs from the defaults.
  std::vector<Parameter> overridden() const {
    const ParameterRanges defaults;
    std::vector<Parameter> out;
    for (auto p : kAllParameters) {
      if (!((*this)[p] == defaults[p])) out.push_back(p);
    }
    return out;
  }

  void validate() const {
    for (auto p : kAllParameters) {
      const Range& r = (*this)[p];
      const std::string field = "uq.ranges." + std::string(to_string(p));
      if (!(r.lo <= r.hi)) throw ValidationError(field, "lower bound exceeds upper bound");
      if (is_probability(p) && (r.lo < 0.0 || r.hi > 1.0)) {
        throw ValidationError(field, "probability range must lie within [0, 1]");
      }
      if (!is_probability(p) && r.lo < 0.0) throw ValidationError(field, "must be non-negative");
      if ((p == Parameter::rho_roof || p == Parameter::eps_roof) && r.hi > 1.0) {
        throw ValidationError(field, "must lie within [0, 1]");
      }
    }
  }

  /// Map a point of the unit hypercube onto the ranges. Probability
  /// parameters never hit 0 or 1 exactly as long as u is in the open interval.
  ParameterSample map_unit(const std::array<double, kParameterCount>& u) const noexcept {
    ParameterSample s;
    for (std::size_t i = 0; i < kParameterCount; ++i) {
      const Range& r = ranges[i];
      s[kAllParameters[i]] = r.lo + u[i] * r.width();
    }
    return s;
  }

  bool operator==(const ParameterRanges&) const = default;
};

}  // namespace ventsim
