#pragma once

#include <algorithm>
#include <array>
#include <atomic>
#include <cmath>
#include <cstdint>
#include <exception>
#include <mutex>
#include <random>
#include <thread>
#include <vector>

#include "ventsim/errors.hpp"
#include "ventsim/parameters.hpp"

namespace ventsim {

/// Uniform doubles on the open interval (0, 1) from a 64-bit Mersenne
/// Twister. The mapping is spelled out (53 high bits, half-ulp offset) so
/// streams are identical across standard libraries.
class UnitRng {
 public:
  explicit UnitRng(std::uint64_t seed) : engine_(seed) {}

  double operator()() noexcept {
    const std::uint64_t bits = engine_() >> 11;
    return (static_cast<double>(bits) + 0.5) * 0x1.0p-53;
  }

 private:
  std::mt19937_64 engine_;
};

struct SamplingPlan {
  std::size_t n_samples = 1000;
  std::uint64_t seed = 0;
  ParameterRanges ranges;
  std::size_t sobol_base = 512;

  void validate() const {
    if (n_samples < 2) throw ValidationError("samples", "at least 2 samples are required");
    ranges.validate();
  }
};

/// Independent uniform draws within each range, in canonical parameter order.
inline std::vector<ParameterSample> sample_parameters(const SamplingPlan& plan) {
  plan.validate();
  UnitRng rng(plan.seed);
  std::vector<ParameterSample> out;
  out.reserve(plan.n_samples);
  std::array<double, kParameterCount> u{};
  for (std::size_t i = 0; i < plan.n_samples; ++i) {
    for (auto& x : u) x = rng();
    out.push_back(plan.ranges.map_unit(u));
  }
  return out;
}

inline unsigned default_thread_count() noexcept { return std::max(1u, std::thread::hardware_concurrency()); }

/// Run fn(i) for i in [0, n) on up to `threads` workers. Results must be
/// written to per-index slots by fn, so scheduling cannot affect them. The
/// first exception thrown by any call is rethrown after all workers finish.
template <class Fn>
void parallel_for(std::size_t n, unsigned threads, Fn&& fn) {
  if (threads == 0) threads = default_thread_count();
  threads = static_cast<unsigned>(std::min<std::size_t>(threads, std::max<std::size_t>(n, 1)));
  std::atomic<std::size_t> next{0};
  std::exception_ptr error;
  std::mutex error_mutex;
  auto worker = [&] {
    while (true) {
      const std::size_t i = next.fetch_add(1);
      if (i >= n) return;
      try {
        fn(i);
      } catch (...) {
        std::lock_guard lock(error_mutex);
        if (!error) error = std::current_exception();
        next.store(n);
        return;
      }
    }
  };
  if (threads <= 1) {
    worker();
  } else {
    std::vector<std::jthread> pool;
    pool.reserve(threads);
    for (unsigned t = 0; t < threads; ++t) pool.emplace_back(worker);
  }
  if (error) std::rethrow_exception(error);
}

/// Linear-interpolation percentile (p in [0, 1]) of a sorted range.
inline double sorted_percentile(const std::vector<double>& sorted, double p) {
  if (sorted.empty()) return std::nan("");
  const double h = (static_cast<double>(sorted.size()) - 1.0) * p;
  const auto lo = static_cast<std::size_t>(std::floor(h));
  if (lo + 1 >= sorted.size()) return sorted.back();
  return sorted[lo] + (h - static_cast<double>(lo)) * (sorted[lo + 1] - sorted[lo]);
}

}  // namespace ventsim
