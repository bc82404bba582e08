#pragma once

// Lumped building thermal model.
//
// State: indoor air temperature plus one core temperature per active thermal
// mass (roof and non-adiabatic walls). Each mass has two conductive
// half-layers; its surface temperatures are algebraic and re-solved from the
// surface flux balances at every right-hand-side evaluation. The floor is a
// fixed-temperature boundary with no core, and the adiabatic wall takes no
// part in the heat balance.
//
// Integration is classical RK4 at a fixed step. The weather trace is
// piecewise constant, so forcing is sampled once per step at its midpoint;
// with steps aligned to the trace windows this is exact.

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "ventsim/domain.hpp"
#include "ventsim/errors.hpp"
#include "ventsim/parameters.hpp"
#include "ventsim/units.hpp"
#include "ventsim/vent.hpp"
#include "ventsim/weather.hpp"

namespace ventsim {

/// Clear-sky effective temperature (Swinbank), kelvin in and out.
inline double sky_temperature(double t_out_k) {
  if (t_out_k < 0.0) throw ValidationError("t_out", "absolute temperature must be >= 0");
  return 0.0553 * std::pow(t_out_k, 1.5);
}

/// Absorbed solar gain on the roof, W.
inline double q_solar(double reflectance, double roof_area, double intensity) {
  if (reflectance < 0.0 || reflectance > 1.0) throw ValidationError("reflectance", "must lie within [0, 1]");
  return (1.0 - reflectance) * roof_area * intensity;
}

/// Net long-wave exchange from the hot to the cold surface, W. Negative when
/// t_hot < t_cold.
constexpr double q_rad_pair(double eps, double area, double t_hot, double t_cold) noexcept {
  const double h2 = t_hot * t_hot;
  const double c2 = t_cold * t_cold;
  return PhysicalConstants::sigma * eps * area * (h2 * h2 - c2 * c2);
}

struct MassTemperatures {
  double core = 0.0;
  double surface_in = 0.0;
  double surface_out = 0.0;

  bool operator==(const MassTemperatures&) const = default;
};

struct ThermalState {
  double time = 0.0;
  double t_air = 0.0;
  std::vector<MassName> names;
  std::vector<MassTemperatures> masses;  // active masses only
};

/// Boundary conditions seen by a thermal mass at one instant.
struct SurfaceContext {
  double t_air = 0.0;       // K
  double t_out = 0.0;       // K
  double h_in = 0.0;        // W/(m^2 K)
  double h_out = 0.0;       // W/(m^2 K)
  double solar = 0.0;       // W/m^2 incident on the roof
  double reflectance = 0.0; // roof
  double eps_sky = 0.0;     // roof outdoor emissivity
  double t_floor = 0.0;     // K, partner of the roof's indoor radiation
};

struct SurfaceSolveOptions {
  double residual_per_area = 1e-6;  // W/m^2
  int max_iterations = 50;
  double max_step = 20.0;  // K per Newton step
};

namespace detail {

// Solve G (T - T_core) + hA (T - T_fluid) + R (T^4 - T_rad^4) - q = 0 for the
// surface temperature T. With R = 0 this is linear and solved directly.
// Otherwise damped Newton from the balance linearised about T_core.
inline double solve_surface_side(double g, double t_core, double ha, double t_fluid, double r, double t_rad,
                                 double q, double area, const SurfaceSolveOptions& opt) {
  if (r == 0.0) return (g * t_core + ha * t_fluid + q) / (g + ha);
  const double tc3 = t_core * t_core * t_core;
  const double tr2 = t_rad * t_rad;
  const double rad_const = r * tr2 * tr2;
  double t = (g * t_core + ha * t_fluid + q - r * tc3 * t_core + rad_const + 4.0 * r * tc3 * t_core) /
             (g + ha + 4.0 * r * tc3);
  double resid = 0.0;
  for (int it = 0; it < opt.max_iterations; ++it) {
    const double t2 = t * t;
    resid = g * (t - t_core) + ha * (t - t_fluid) + r * t2 * t2 - rad_const - q;
    if (std::abs(resid) <= opt.residual_per_area * area) return t;
    const double slope = g + ha + 4.0 * r * t2 * t;
    const double step = std::clamp(-resid / slope, -opt.max_step, opt.max_step);
    t += step;
  }
  throw SolverError(0.0, "surface balance did not converge (residual " + std::to_string(resid / area) +
                             " W/m^2)");
}

}  // namespace detail

/// Surface temperatures of a roof or wall from its core temperature.
///
/// Walls: k A (T_s - T_core)/(t/2) = h A (T_fluid - T_s) on each side.
/// Roof: the indoor side adds long-wave exchange with the floor, the outdoor
/// side adds absorbed solar and long-wave loss to the sky.
/// An adiabatic wall has no outdoor flux, so its outdoor surface sits at the
/// core temperature.
inline MassTemperatures solve_surface_temperatures(const ThermalMassSpec& mass, double t_core,
                                                   const SurfaceContext& ctx, SurfaceSolveOptions opt = {}) {
  if (mass.is_floor()) throw ValidationError("mass", "the floor has no surface balance");
  const double g = mass.half_layer_conductance();
  const double a = mass.area;
  MassTemperatures out;
  out.core = t_core;
  if (mass.name == MassName::roof) {
    const double r_in = PhysicalConstants::sigma * mass.emissivity_indoor * a;
    const double r_out = PhysicalConstants::sigma * ctx.eps_sky * a;
    out.surface_in = detail::solve_surface_side(g, t_core, ctx.h_in * a, ctx.t_air, r_in, ctx.t_floor, 0.0, a, opt);
    out.surface_out = detail::solve_surface_side(g, t_core, ctx.h_out * a, ctx.t_out, r_out,
                                                 sky_temperature(ctx.t_out),
                                                 q_solar(ctx.reflectance, a, ctx.solar), a, opt);
  } else {
    out.surface_in = detail::solve_surface_side(g, t_core, ctx.h_in * a, ctx.t_air, 0.0, 0.0, 0.0, a, opt);
    out.surface_out = mass.adiabatic
                          ? t_core
                          : detail::solve_surface_side(g, t_core, ctx.h_out * a, ctx.t_out, 0.0, 0.0, 0.0, a, opt);
  }
  return out;
}

/// True for masses that carry a core temperature in the model state.
inline bool is_active_mass(const ThermalMassSpec& m) noexcept { return !m.is_floor() && !m.adiabatic; }

/// dT_air/dt in K/s. `surfaces` is aligned with `scenario.masses`; entries for
/// the floor and the adiabatic wall are ignored.
inline double air_tendency(const ScenarioConfig& scenario, double t_air, std::span<const MassTemperatures> surfaces,
                           double h_in, double t_out, double vent_rate) {
  const double rho_cp = scenario.air.volumetric_heat_capacity();
  double q = rho_cp * vent_rate * (t_out - t_air);
  for (std::size_t j = 0; j < scenario.masses.size(); ++j) {
    const auto& m = scenario.masses[j];
    if (m.adiabatic) continue;
    const double t_s = m.is_floor() ? m.constant_temperature.value() : surfaces[j].surface_in;
    q += h_in * m.area * (t_s - t_air);
  }
  return q / (rho_cp * scenario.geometry.air_volume);
}

/// dT_core/dt in K/s from conduction through both half-layers. The adiabatic
/// wall conducts through its indoor half-layer only.
inline double mass_tendency(const ThermalMassSpec& mass, double t_core, double t_surface_in, double t_surface_out) {
  const double g = mass.half_layer_conductance();
  double q = g * (t_surface_in - t_core);
  if (!mass.adiabatic) q += g * (t_surface_out - t_core);
  return q / mass.heat_capacity();
}

struct IntegrationOptions {
  double horizon = 0.0;          // s; 0 means the trace horizon
  double dt = 10.0;              // s
  double output_interval = 60.0; // s
  double spinup = 6.0 * 3600.0;  // s, simulated and discarded before t = 0
  std::uint64_t sample_id = 0;
  std::optional<double> initial_temperature;  // K; default is the first-window outdoor temperature
};

struct SimulationResult {
  std::uint64_t sample_id = 0;
  std::optional<VentModelKind> model;
  std::uint64_t scenario_hash = 0;
  double air_volume = 0.0;
  std::vector<MassName> mass_names;  // active masses, state order

  std::vector<double> time;       // s from trace start
  std::vector<double> t_air;      // K
  std::vector<double> vent_rate;  // m^3/s
  std::vector<double> ach;        // 1/h
  std::vector<MassTemperatures> mass_temps;  // [step * n_masses + j]
  // Energy bookkeeping: stored enthalpy relative to the start of spin-up and
  // cumulative heat that crossed the system boundary, both J.
  std::vector<double> enthalpy;
  std::vector<double> boundary_heat;

  std::size_t steps() const noexcept { return time.size(); }
  const MassTemperatures& mass(std::size_t step, std::size_t j) const {
    return mass_temps[step * mass_names.size() + j];
  }
  ThermalState state(std::size_t step) const {
    ThermalState s;
    s.time = time[step];
    s.t_air = t_air[step];
    s.names = mass_names;
    s.masses.assign(mass_temps.begin() + static_cast<std::ptrdiff_t>(step * mass_names.size()),
                    mass_temps.begin() + static_cast<std::ptrdiff_t>((step + 1) * mass_names.size()));
    return s;
  }
};

namespace detail {

inline bool is_multiple(double x, double step) {
  const double q = x / step;
  return std::abs(q - std::round(q)) <= 1e-9 * std::max(1.0, q);
}

struct Rhs {
  const ScenarioConfig& scenario;
  const ParameterSample& sample;
  std::vector<std::size_t> active;  // indices into scenario.masses
  double t_floor;
  std::vector<MassTemperatures> surf;  // aligned with scenario.masses

  // Evaluate derivatives of y = [T_air, cores..., boundary heat].
  template <class VentFn>
  double operator()(const std::vector<double>& y, const WeatherInputTrace::Value& w, VentFn& vent,
                    std::vector<double>& dy, double time) {
    SurfaceContext ctx;
    ctx.t_air = y[0];
    ctx.t_out = w.outdoor_temp;
    ctx.h_in = sample.h_in;
    ctx.h_out = sample.h_out;
    ctx.solar = w.solar;
    ctx.reflectance = sample.rho_roof;
    ctx.eps_sky = sample.eps_roof;
    ctx.t_floor = t_floor;

    double boundary = 0.0;
    for (std::size_t k = 0; k < active.size(); ++k) {
      const auto& m = scenario.masses[active[k]];
      try {
        surf[active[k]] = solve_surface_temperatures(m, y[1 + k], ctx);
      } catch (const SolverError& e) {
        throw SolverError(time, e.what());
      }
      const auto& s = surf[active[k]];
      dy[1 + k] = mass_tendency(m, s.core, s.surface_in, s.surface_out);
      boundary += sample.h_out * m.area * (w.outdoor_temp - s.surface_out);
      if (m.name == MassName::roof) {
        boundary += q_solar(sample.rho_roof, m.area, w.solar);
        boundary -= q_rad_pair(sample.eps_roof, m.area, s.surface_out, sky_temperature(w.outdoor_temp));
        boundary -= q_rad_pair(m.emissivity_indoor, m.area, s.surface_in, t_floor);
      }
    }
    const double rate = vent(DrivingState{y[0], w.outdoor_temp, w.wind_speed});
    const double rho_cp = scenario.air.volumetric_heat_capacity();
    dy[0] = air_tendency(scenario, y[0], surf, sample.h_in, w.outdoor_temp, rate);
    const auto& floor = scenario.floor();
    boundary += sample.h_in * floor.area * (t_floor - y[0]);
    boundary += rho_cp * rate * (w.outdoor_temp - y[0]);
    dy.back() = boundary;
    return rate;
  }
};

}  // namespace detail

/// Integrate the coupled air / thermal-mass system with an arbitrary
/// ventilation model `vent(DrivingState) -> m^3/s`.
template <class VentFn>
SimulationResult integrate_with(const ScenarioConfig& scenario, const WeatherInputTrace& trace,
                                const ParameterSample& sample, VentFn&& vent, const IntegrationOptions& opt = {}) {
  const auto& floor = scenario.floor();
  if (!floor.constant_temperature) {
    throw ValidationError("masses.floor.constant_temperature_c", "floor temperature not resolved");
  }
  if (trace.windows.empty()) throw ValidationError("trace", "empty weather trace");
  const double horizon = opt.horizon > 0.0 ? opt.horizon : trace.horizon();
  if (!(opt.dt > 0.0)) throw ValidationError("dt", "must be > 0");
  if (!detail::is_multiple(horizon, opt.dt)) throw ValidationError("horizon", "must be a multiple of dt");
  if (!detail::is_multiple(opt.output_interval, opt.dt)) {
    throw ValidationError("output_interval", "must be a multiple of dt");
  }
  if (opt.spinup < 0.0 || !detail::is_multiple(opt.spinup, opt.dt)) {
    throw ValidationError("spinup", "must be a non-negative multiple of dt");
  }
  if (sample.h_in < 0.0 || sample.h_out < 0.0) throw ValidationError("sample", "heat transfer coefficients must be >= 0");
  if (sample.rho_roof < 0.0 || sample.rho_roof > 1.0 || sample.eps_roof < 0.0 || sample.eps_roof > 1.0) {
    throw ValidationError("sample", "reflectance and emissivity must lie within [0, 1]");
  }

  detail::Rhs rhs{scenario, sample, {}, *floor.constant_temperature, {}};
  rhs.surf.resize(scenario.masses.size());
  SimulationResult res;
  res.sample_id = opt.sample_id;
  res.scenario_hash = scenario.hash;
  res.air_volume = scenario.geometry.air_volume;
  for (std::size_t j = 0; j < scenario.masses.size(); ++j) {
    if (is_active_mass(scenario.masses[j])) {
      rhs.active.push_back(j);
      res.mass_names.push_back(scenario.masses[j].name);
    }
  }
  const std::size_t n_state = rhs.active.size() + 2;

  const auto n_spin = static_cast<long long>(std::llround(opt.spinup / opt.dt));
  const auto n_main = static_cast<long long>(std::llround(horizon / opt.dt));
  const auto out_every = static_cast<long long>(std::llround(opt.output_interval / opt.dt));
  const std::size_t n_out = static_cast<std::size_t>(n_main / out_every) + 1;
  res.time.reserve(n_out);
  res.t_air.reserve(n_out);
  res.vent_rate.reserve(n_out);
  res.ach.reserve(n_out);
  res.enthalpy.reserve(n_out);
  res.boundary_heat.reserve(n_out);
  res.mass_temps.reserve(n_out * res.mass_names.size());

  const double t0 = -static_cast<double>(n_spin) * opt.dt;
  const double t_init = opt.initial_temperature.value_or(trace.at(0.0).outdoor_temp);
  require_plausible_temperature(t_init, "initial_temperature");
  std::vector<double> y(n_state, t_init);
  y.back() = 0.0;
  std::vector<double> k1(n_state), k2(n_state), k3(n_state), k4(n_state), tmp(n_state), scratch(n_state);

  const double air_cap = scenario.air.volumetric_heat_capacity() * scenario.geometry.air_volume;
  auto enthalpy = [&](const std::vector<double>& s) {
    double h = air_cap * s[0];
    for (std::size_t k = 0; k < rhs.active.size(); ++k) h += scenario.masses[rhs.active[k]].heat_capacity() * s[1 + k];
    return h;
  };
  const double h_start = enthalpy(y);

  auto check = [&](const std::vector<double>& s, double time) {
    for (std::size_t i = 0; i + 1 < s.size(); ++i) {
      if (!is_plausible_temperature(s[i])) {
        throw SolverError(time, "state left the plausible temperature band (" + std::to_string(s[i]) +
                                    " K); integration diverged");
      }
    }
  };

  auto record = [&](double time) {
    const auto& w = trace.at(time);
    const double rate = rhs(y, w, vent, scratch, time);
    for (std::size_t k = 0; k < rhs.active.size(); ++k) {
      const auto& s = rhs.surf[rhs.active[k]];
      if (!is_plausible_temperature(s.surface_in) || !is_plausible_temperature(s.surface_out)) {
        throw SolverError(time, "surface temperature left the plausible band; integration diverged");
      }
      res.mass_temps.push_back(s);
    }
    res.time.push_back(time);
    res.t_air.push_back(y[0]);
    res.vent_rate.push_back(rate);
    res.ach.push_back(rate * 3600.0 / scenario.geometry.air_volume);
    res.enthalpy.push_back(enthalpy(y) - h_start);
    res.boundary_heat.push_back(y.back());
  };

  const long long total = n_spin + n_main;
  for (long long step = 0; step <= total; ++step) {
    const double t = t0 + static_cast<double>(step) * opt.dt;
    const long long main_step = step - n_spin;
    if (main_step >= 0 && main_step % out_every == 0) record(t);
    if (step == total) break;

    const auto& w = trace.at(t + 0.5 * opt.dt);
    const double h = opt.dt;
    rhs(y, w, vent, k1, t);
    for (std::size_t i = 0; i < n_state; ++i) tmp[i] = y[i] + 0.5 * h * k1[i];
    rhs(tmp, w, vent, k2, t + 0.5 * h);
    for (std::size_t i = 0; i < n_state; ++i) tmp[i] = y[i] + 0.5 * h * k2[i];
    rhs(tmp, w, vent, k3, t + 0.5 * h);
    for (std::size_t i = 0; i < n_state; ++i) tmp[i] = y[i] + h * k3[i];
    rhs(tmp, w, vent, k4, t + h);
    for (std::size_t i = 0; i < n_state; ++i) y[i] += h / 6.0 * (k1[i] + 2.0 * k2[i] + 2.0 * k3[i] + k4[i]);
    check(y, t + h);
  }
  return res;
}

/// Integrate with one of the named ventilation models on the scenario's
/// active configuration.
inline SimulationResult integrate(const ScenarioConfig& scenario, const WeatherInputTrace& trace,
                                  const ParameterSample& sample, VentModelKind model,
                                  const std::optional<RichardsonCoefficients>& coeffs = std::nullopt,
                                  const IntegrationOptions& opt = {}) {
  const VentilationModel vent(model, scenario.ventilation, scenario.geometry.reference_height, coeffs);
  auto res = integrate_with(scenario, trace, sample, vent, opt);
  res.model = model;
  return res;
}

/// `time_s,t_air_k,t_<mass>_core_k,t_<mass>_in_k,t_<mass>_out_k...,vent_rate_m3s,ach`
inline std::string result_to_csv(const SimulationResult& r) {
  std::vector<std::string> header = {"time_s", "t_air_k"};
  for (auto n : r.mass_names) {
    const std::string base = "t_" + std::string(to_string(n));
    header.push_back(base + "_core_k");
    header.push_back(base + "_in_k");
    header.push_back(base + "_out_k");
  }
  header.push_back("vent_rate_m3s");
  header.push_back("ach");
  csv::Writer w(header);
  std::vector<std::string> row;
  for (std::size_t i = 0; i < r.steps(); ++i) {
    row.clear();
    row.push_back(csv::fmt(r.time[i]));
    row.push_back(csv::fmt(r.t_air[i]));
    for (std::size_t j = 0; j < r.mass_names.size(); ++j) {
      const auto& m = r.mass(i, j);
      row.push_back(csv::fmt(m.core));
      row.push_back(csv::fmt(m.surface_in));
      row.push_back(csv::fmt(m.surface_out));
    }
    row.push_back(csv::fmt(r.vent_rate[i]));
    row.push_back(csv::fmt(r.ach[i]));
    w.cells(row);
  }
  return w.str();
}

}  // namespace ventsim
