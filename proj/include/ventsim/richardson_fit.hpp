#pragma once

// Least-squares calibration of the Richardson-fit ventilation model
//   q(Ri) = sqrt(|c1 Ri + c2|) + c3,   c3 >= 0
// from non-dimensional rate measurements.
//
// The model is invariant under (c1, c2) -> (-c1, -c2), so results are
// reported in the canonical orientation c2 >= 0 (c1 >= 0 when c2 == 0).

#include <algorithm>
#include <array>
#include <cmath>
#include <limits>
#include <span>
#include <string>
#include <vector>

#include <Eigen/Dense>

#include "ventsim/csv.hpp"
#include "ventsim/errors.hpp"
#include "ventsim/vent.hpp"

namespace ventsim {

struct FitPoint {
  double ri_v = 0.0;
  double nondim_rate = 0.0;
  double weight = 1.0;
};

struct RichardsonFitResult {
  RichardsonCoefficients coeffs;
  double rms_residual = 0.0;  // weighted RMS of (model - observed)
  int iterations = 0;         // of the winning start
  int start = 0;              // index of the winning start
};

struct RichardsonFitOptions {
  int max_iterations = 500;
  double step_tolerance = 1e-14;
};

namespace detail {

struct LmOutcome {
  Eigen::Vector3d x;
  double cost = 0.0;
  int iterations = 0;
};

inline double weighted_cost(std::span<const FitPoint> pts, const Eigen::Vector3d& x) {
  const RichardsonCoefficients c{x[0], x[1], x[2]};
  double s = 0.0;
  for (const auto& p : pts) {
    const double r = richardson_nondim_rate(c, p.ri_v) - p.nondim_rate;
    s += p.weight * r * r;
  }
  return s;
}

inline LmOutcome levenberg_marquardt(std::span<const FitPoint> pts, Eigen::Vector3d x,
                                     const RichardsonFitOptions& opt) {
  x[2] = std::max(0.0, x[2]);
  double cost = weighted_cost(pts, x);
  double lambda = 1e-3;
  int it = 0;
  for (; it < opt.max_iterations; ++it) {
    Eigen::Matrix3d jtj = Eigen::Matrix3d::Zero();
    Eigen::Vector3d jtr = Eigen::Vector3d::Zero();
    for (const auto& p : pts) {
      const double z = x[0] * p.ri_v + x[1];
      const double az = std::max(std::abs(z), 1e-14);
      const double root = std::sqrt(az);
      const double sgn = z >= 0.0 ? 1.0 : -1.0;
      const double r = root + x[2] - p.nondim_rate;
      const Eigen::Vector3d row(sgn * p.ri_v / (2.0 * root), sgn / (2.0 * root), 1.0);
      jtj.noalias() += p.weight * row * row.transpose();
      jtr.noalias() += p.weight * r * row;
    }
    bool accepted = false;
    Eigen::Vector3d step = Eigen::Vector3d::Zero();
    while (lambda < 1e20) {
      Eigen::Matrix3d a = jtj;
      for (int d = 0; d < 3; ++d) a(d, d) += lambda * std::max(jtj(d, d), 1e-12);
      step = a.ldlt().solve(-jtr);
      Eigen::Vector3d trial = x + step;
      trial[2] = std::max(0.0, trial[2]);
      step = trial - x;
      const double trial_cost = weighted_cost(pts, trial);
      if (std::isfinite(trial_cost) && trial_cost <= cost) {
        x = trial;
        cost = trial_cost;
        lambda = std::max(lambda / 3.0, 1e-15);
        accepted = true;
        break;
      }
      lambda *= 4.0;
    }
    if (!accepted) break;  // no descent direction left
    if (step.norm() <= opt.step_tolerance * (1.0 + x.norm()) || cost == 0.0) {
      ++it;
      break;
    }
  }
  return {x, cost, it};
}

}  // namespace detail

/// Deterministic multi-start damped least squares. Eight starts cover both
/// relative signs of (c1, c2) and two magnitudes of each, since the absolute
/// value leaves a kink at c1 Ri + c2 = 0 that a single start can stall on.
inline RichardsonFitResult fit_richardson_coeffs(std::span<const FitPoint> points,
                                                 RichardsonFitOptions opt = {}) {
  if (points.size() < 3) throw ValidationError("points", "at least 3 points are required");
  double wsum = 0.0;
  double min_rate = std::numeric_limits<double>::infinity();
  bool distinct = false;
  for (const auto& p : points) {
    if (!std::isfinite(p.ri_v) || !std::isfinite(p.nondim_rate)) {
      throw ValidationError("points", "non-finite value");
    }
    if (!(p.weight > 0.0)) throw ValidationError("points.weight", "weights must be > 0");
    wsum += p.weight;
    min_rate = std::min(min_rate, p.nondim_rate);
    if (p.ri_v != points.front().ri_v) distinct = true;
  }
  if (!distinct) throw ValidationError("points.ri_v", "all Richardson numbers are identical");

  const double c3_start = std::max(0.0, 0.5 * min_rate);
  std::vector<Eigen::Vector3d> starts;
  for (double c1_mag : {0.05, 0.5}) {
    for (double c1_sign : {1.0, -1.0}) {
      for (double c2 : {0.01, 0.1}) starts.emplace_back(c1_sign * c1_mag, c2, c3_start);
    }
  }

  RichardsonFitResult best;
  double best_cost = std::numeric_limits<double>::infinity();
  for (std::size_t i = 0; i < starts.size(); ++i) {
    const auto out = detail::levenberg_marquardt(points, starts[i], opt);
    if (out.cost < best_cost) {
      best_cost = out.cost;
      best.coeffs = {out.x[0], out.x[1], out.x[2]};
      best.iterations = out.iterations;
      best.start = static_cast<int>(i);
    }
  }
  if (best.coeffs.c2 < 0.0 || (best.coeffs.c2 == 0.0 && best.coeffs.c1 < 0.0)) {
    best.coeffs.c1 = -best.coeffs.c1;
    best.coeffs.c2 = -best.coeffs.c2;
  }
  best.rms_residual = std::sqrt(best_cost / wsum);
  return best;
}

/// Read `ri_v,nondim_rate[,weight]`.
inline std::vector<FitPoint> read_fit_points_csv(const std::string& path) {
  const auto t = csv::Table::read_file(path);
  const auto c_ri = t.require_column("ri_v");
  const auto c_rate = t.require_column("nondim_rate");
  const auto c_w = t.column("weight");
  std::vector<FitPoint> out;
  for (std::size_t r = 0; r < t.size(); ++r) {
    FitPoint p{t.number(r, c_ri), t.number(r, c_rate), 1.0};
    if (c_w && !t.field(r, *c_w).empty()) p.weight = t.number(r, *c_w);
    if (!(p.weight > 0.0)) throw InputError(path, t.line(r), "weight must be > 0");
    out.push_back(p);
  }
  return out;
}

inline std::string coefficients_to_csv(const RichardsonFitResult& fit, std::size_t n_points) {
  csv::Writer w({"c1", "c2", "c3", "rms_residual", "n_points"});
  w.row(fit.coeffs.c1, fit.coeffs.c2, fit.coeffs.c3, fit.rms_residual, n_points);
  return w.str();
}

inline RichardsonCoefficients read_coefficients_csv(const std::string& path) {
  const auto t = csv::Table::read_file(path);
  if (t.size() != 1) throw InputError(path, 0, "expected exactly one coefficient row");
  RichardsonCoefficients c{t.number(0, t.require_column("c1")), t.number(0, t.require_column("c2")),
                           t.number(0, t.require_column("c3"))};
  if (c.c3 < 0.0) throw InputError(path, t.line(0), "c3 must be >= 0");
  return c;
}

}  // namespace ventsim
