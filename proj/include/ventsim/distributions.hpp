#pragma once

#include <algorithm>
#include <cmath>
#include <concepts>
#include <cstdint>
#include <limits>
#include <span>
#include <string>
#include <utility>

#include <boost/math/distributions/normal.hpp>
#include <boost/math/tools/roots.hpp>

#include "ventsim/errors.hpp"

namespace ventsim {

template <class D>
concept QuantileDistribution = requires(const D& d, double p) {
  { d.quantile(p) } -> std::convertible_to<double>;
  { d.cdf(p) } -> std::convertible_to<double>;
};

/// Normal distribution truncated to mean +/- 3.5 standard deviations.
struct TruncatedNormal {
  static constexpr double kTruncation = 3.5;

  double mean = 0.0;
  double stddev = 0.0;

  double lower() const noexcept { return mean - kTruncation * stddev; }
  double upper() const noexcept { return mean + kTruncation * stddev; }

  double cdf(double x) const {
    if (stddev == 0.0) return x < mean ? 0.0 : 1.0;
    if (x <= lower()) return 0.0;
    if (x >= upper()) return 1.0;
    const boost::math::normal_distribution<double> n;
    const double lo = boost::math::cdf(n, -kTruncation);
    const double mass = boost::math::cdf(n, kTruncation) - lo;
    return (boost::math::cdf(n, (x - mean) / stddev) - lo) / mass;
  }

  double quantile(double p) const {
    if (stddev == 0.0) return mean;
    const boost::math::normal_distribution<double> n;
    const double lo = boost::math::cdf(n, -kTruncation);
    const double mass = boost::math::cdf(n, kTruncation) - lo;
    const double z = boost::math::quantile(n, lo + p * mass);
    return mean + stddev * std::clamp(z, -kTruncation, kTruncation);
  }

  bool operator==(const TruncatedNormal&) const = default;
};

struct Uniform {
  double min = 0.0;
  double max = 0.0;

  double cdf(double x) const noexcept {
    if (x < min) return 0.0;
    if (x >= max) return 1.0;
    return (x - min) / (max - min);
  }
  double quantile(double p) const noexcept { return min + p * (max - min); }

  bool operator==(const Uniform&) const = default;
};

/// Two-parameter Weibull. An infinite shape is a point mass at `scale`, which
/// is what windows with constant wind speed fit to.
struct Weibull {
  double scale = 1.0;
  double shape = 1.0;

  bool degenerate() const noexcept { return std::isinf(shape); }

  double cdf(double x) const noexcept {
    if (x <= 0.0) return 0.0;
    if (degenerate()) return x < scale ? 0.0 : 1.0;
    return -std::expm1(-std::pow(x / scale, shape));
  }
  double quantile(double p) const noexcept {
    if (degenerate()) return scale;
    return scale * std::pow(-std::log1p(-p), 1.0 / shape);
  }

  bool operator==(const Weibull&) const = default;
};

/// p-quantile of `dist`; p must lie in the open interval (0, 1).
template <QuantileDistribution D>
double inverse_transform_sample(const D& dist, double p) {
  if (!(p > 0.0 && p < 1.0)) {
    throw ValidationError("p", "probability " + std::to_string(p) + " outside (0, 1)");
  }
  return dist.quantile(p);
}

struct WeibullFitOptions {
  double tolerance = 1e-8;   // on the shape parameter
  std::uintmax_t max_iterations = 100;
};

/// Maximum-likelihood Weibull fit by root finding on the profile likelihood
/// equation for the shape:
///   sum(x^k ln x) / sum(x^k) - 1/k - mean(ln x) = 0
/// followed by the closed-form scale (mean x^k)^(1/k). Samples must be > 0.
inline Weibull fit_weibull_mle(std::span<const double> xs, WeibullFitOptions opt = {}) {
  if (xs.size() < 2) throw ValidationError("wind", "Weibull fit needs at least 2 samples");
  double xmax = 0.0;
  double xmin = std::numeric_limits<double>::infinity();
  for (double x : xs) {
    if (!(x > 0.0)) throw ValidationError("wind", "Weibull fit needs strictly positive samples");
    xmax = std::max(xmax, x);
    xmin = std::min(xmin, x);
  }
  if (xmin == xmax) return Weibull{xmax, std::numeric_limits<double>::infinity()};

  // Work with y = x / xmax in (0, 1] so x^k never overflows.
  const double n = static_cast<double>(xs.size());
  double mean_log = 0.0;
  for (double x : xs) mean_log += std::log(x / xmax);
  mean_log /= n;

  auto profile = [&](double k) {
    double s0 = 0.0;
    double s1 = 0.0;
    for (double x : xs) {
      const double ly = std::log(x / xmax);
      const double w = std::exp(k * ly);
      s0 += w;
      s1 += w * ly;
    }
    return s1 / s0 - 1.0 / k - mean_log;
  };

  // The profile function increases monotonically from -inf (k -> 0) to
  // -mean_log > 0 (k -> inf); expand the bracket until it changes sign.
  double lo = 0.5;
  double hi = 2.0;
  while (profile(lo) > 0.0) lo *= 0.5;
  while (profile(hi) < 0.0) {
    hi *= 2.0;
    if (hi > 1e6) break;
  }

  std::uintmax_t iters = opt.max_iterations;
  const auto tol = [&](double a, double b) { return std::abs(b - a) <= opt.tolerance; };
  const auto [a, b] = boost::math::tools::toms748_solve(profile, lo, hi, tol, iters);
  if (iters >= opt.max_iterations && !tol(a, b)) {
    throw SolverError(0.0, "Weibull shape root finding did not converge");
  }
  const double k = 0.5 * (a + b);

  double s0 = 0.0;
  for (double x : xs) s0 += std::exp(k * std::log(x / xmax));
  const double scale = xmax * std::pow(s0 / n, 1.0 / k);
  return Weibull{scale, k};
}

}  // namespace ventsim
