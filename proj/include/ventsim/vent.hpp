#pragma once

// Envelope-flow ventilation models. Every function is a pure function of the
// instantaneous driving state; rates are volume flows in m^3/s.
//
// Sign convention: dT = T_out - T_in, so a warm afternoon (outdoor warmer than
// indoor) gives a positive buoyancy term and a positive Richardson number.
// The reference temperature is the indoor/outdoor mean in kelvin.

#include <algorithm>
#include <array>
#include <cmath>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "ventsim/domain.hpp"
#include "ventsim/errors.hpp"
#include "ventsim/units.hpp"

namespace ventsim {

enum class VentModelKind { CrossAssisting, CrossOpposing, SingleSided, RichardsonFit };

inline constexpr std::array<VentModelKind, 3> kEnsembleModels = {
    VentModelKind::CrossAssisting, VentModelKind::CrossOpposing, VentModelKind::SingleSided};

/// Short names used on the command line and in report files.
constexpr std::string_view to_string(VentModelKind k) noexcept {
  switch (k) {
    case VentModelKind::CrossAssisting: return "cross+";
    case VentModelKind::CrossOpposing: return "cross-";
    case VentModelKind::SingleSided: return "single";
    case VentModelKind::RichardsonFit: return "richardson";
  }
  return "?";
}

inline VentModelKind parse_vent_model(std::string_view s) {
  for (auto k : {VentModelKind::CrossAssisting, VentModelKind::CrossOpposing, VentModelKind::SingleSided,
                 VentModelKind::RichardsonFit}) {
    if (to_string(k) == s) return k;
  }
  throw ValidationError("models", "unknown ventilation model '" + std::string(s) + "'");
}

/// `ensemble` expands to the three ensemble members.
inline std::vector<VentModelKind> parse_model_selection(std::string_view s) {
  if (s == "ensemble") return {kEnsembleModels.begin(), kEnsembleModels.end()};
  std::vector<VentModelKind> out;
  std::size_t start = 0;
  while (start <= s.size()) {
    const auto pos = s.find(',', start);
    const auto tok = s.substr(start, pos == std::string_view::npos ? std::string_view::npos : pos - start);
    const auto k = parse_vent_model(tok);
    for (auto prev : out) {
      if (prev == k) throw ValidationError("models", "model listed twice");
    }
    out.push_back(k);
    if (pos == std::string_view::npos) break;
    start = pos + 1;
  }
  return out;
}

/// Wind pressure coefficient difference assumed for the two cross models.
constexpr double ensemble_delta_cp(VentModelKind k) noexcept {
  return k == VentModelKind::CrossAssisting ? 0.5 : (k == VentModelKind::CrossOpposing ? -0.5 : 0.0);
}

struct DrivingState {
  double t_in = 0.0;    // K
  double t_out = 0.0;   // K
  double u_wind = 0.0;  // m/s at the reference height

  double delta_t() const noexcept { return t_out - t_in; }
  double mean_t() const noexcept { return 0.5 * (t_in + t_out); }
};

inline void validate(const DrivingState& s) {
  require_plausible_temperature(s.t_in, "t_in");
  require_plausible_temperature(s.t_out, "t_out");
  if (!(s.u_wind >= 0.0)) throw ValidationError("u_wind", "must be >= 0");
}

struct RichardsonCoefficients {
  double c1 = 0.0;
  double c2 = 0.0;
  double c3 = 0.0;

  bool operator==(const RichardsonCoefficients&) const = default;
};

/// Wind speeds below this are raised to it before dividing by U^2.
inline constexpr double kWindFloor = 0.05;

/// Phaff-De Gids single-sided coefficients.
struct SingleSidedCoefficients {
  static constexpr double wind = 0.001;       // C1, -
  static constexpr double buoyancy = 0.035;   // C2, m/(s^2 K)
  static constexpr double turbulence = 0.01;  // C3, m^2/s^2
};

/// Series combination of two discharge-weighted openings.
inline double effective_area(double a1, double a2, double cd1, double cd2) {
  if (!(cd1 > 0.0 && cd1 <= 1.0)) throw ValidationError("cd1", "discharge coefficient must lie within (0, 1]");
  if (!(cd2 > 0.0 && cd2 <= 1.0)) throw ValidationError("cd2", "discharge coefficient must lie within (0, 1]");
  if (a1 < 0.0 || a2 < 0.0) throw ValidationError("area", "must be >= 0");
  if (a1 == 0.0 || a2 == 0.0) return 0.0;
  const double c1 = cd1 * cd1;
  const double c2 = cd2 * cd2;
  return a1 * a2 / std::sqrt((c1 * a1 * a1 + c2 * a2 * a2) / (2.0 * c1 * c2));
}

inline double effective_area(const VentilationConfig& cfg) {
  return effective_area(cfg.opening_a.area, cfg.opening_b.area, cfg.opening_a.discharge_coefficient,
                        cfg.opening_b.discharge_coefficient);
}

/// Steady envelope-flow solution for two openings; `delta_cp` > 0 means wind
/// assists buoyancy.
inline double cross_ventilation_rate(const DrivingState& s, const VentilationConfig& cfg, double delta_cp) {
  const double buoyancy = PhysicalConstants::g * cfg.delta_h * s.delta_t() / s.mean_t();
  const double wind = s.u_wind * s.u_wind * delta_cp / 2.0;
  return effective_area(cfg) * std::sqrt(std::abs(buoyancy + wind));
}

inline double single_sided_rate(const OpeningSpec& opening, const DrivingState& s) {
  using C = SingleSidedCoefficients;
  return 0.5 * opening.area *
         std::sqrt(C::wind * s.u_wind * s.u_wind + C::buoyancy * opening.height * std::abs(s.delta_t()) +
                   C::turbulence);
}

inline double combined_single_sided(const VentilationConfig& cfg, const DrivingState& s) {
  return single_sided_rate(cfg.opening_a, s) + single_sided_rate(cfg.opening_b, s);
}

struct RichardsonNumber {
  double value = 0.0;
  bool wind_clamped = false;  // true when U was raised to kWindFloor
};

/// g (dT / T_mean) h / U^2 with U floored at kWindFloor.
inline RichardsonNumber richardson_number(const DrivingState& s, double h) {
  const bool clamped = s.u_wind < kWindFloor;
  const double u = clamped ? kWindFloor : s.u_wind;
  return {PhysicalConstants::g * (s.delta_t() / s.mean_t()) * h / (u * u), clamped};
}

/// Non-dimensional Richardson-fit rate sqrt(|c1 Ri + c2|) + c3.
inline double richardson_nondim_rate(const RichardsonCoefficients& c, double ri) noexcept {
  return std::sqrt(std::abs(c.c1 * ri + c.c2)) + c.c3;
}

inline double richardson_fit_rate(const RichardsonCoefficients& c, const VentilationConfig& cfg,
                                  const DrivingState& s, double h) {
  const double u = std::max(s.u_wind, kWindFloor);
  const double ri = richardson_number(s, h).value;
  return std::max(0.0, cfg.total_area * u * richardson_nondim_rate(c, ri));
}

/// A ventilation model bound to a configuration, ready to evaluate.
class VentilationModel {
 public:
  VentilationModel(VentModelKind kind, VentilationConfig cfg, double reference_height,
                   std::optional<RichardsonCoefficients> coeffs = std::nullopt)
      : kind_(kind), cfg_(std::move(cfg)), h_(reference_height), coeffs_(coeffs) {
    if (kind_ == VentModelKind::RichardsonFit && !coeffs_) {
      throw ValidationError("coeffs", "the Richardson-fit model needs coefficients");
    }
    a_eff_ = effective_area(cfg_);
  }

  VentModelKind kind() const noexcept { return kind_; }

  double operator()(const DrivingState& s) const {
    switch (kind_) {
      case VentModelKind::CrossAssisting:
      case VentModelKind::CrossOpposing: {
        const double buoyancy = PhysicalConstants::g * cfg_.delta_h * s.delta_t() / s.mean_t();
        const double wind = s.u_wind * s.u_wind * ensemble_delta_cp(kind_) / 2.0;
        return a_eff_ * std::sqrt(std::abs(buoyancy + wind));
      }
      case VentModelKind::SingleSided: return combined_single_sided(cfg_, s);
      case VentModelKind::RichardsonFit: return richardson_fit_rate(*coeffs_, cfg_, s, h_);
    }
    return 0.0;
  }

 private:
  VentModelKind kind_;
  VentilationConfig cfg_;
  double h_;
  std::optional<RichardsonCoefficients> coeffs_;
  double a_eff_ = 0.0;
};

}  // namespace ventsim
