#pragma once

// Independent reference computations used to check the library. Nothing here
// calls into the code under test.

#include <cmath>
#include <cstdint>
#include <limits>
#include <span>
#include <vector>

namespace delaylab::oracle {

inline double kl(double p, double q) {
  const auto term = [](double x, double y) {
    if (x == 0.0) return 0.0;
    if (y == 0.0) return std::numeric_limits<double>::infinity();
    return x * std::log(x / y);
  };
  return term(p, q) + term(1.0 - p, 1.0 - q);
}

inline double kl_threshold(double t) {
  const double lt = std::log(t);
  const double v = lt + 3.0 * std::log(lt > 1.0 ? lt : 1.0);
  return v > 0.0 ? v : 0.0;
}

// Largest grid point q = mean + k*step (q <= 1) with s*d(mean,q) <= threshold,
// scanning a coarse grid first and then the fine grid inside the bracket.
inline double kl_ucb_grid(double mean, std::int64_t s, double t, double step = 1e-6) {
  const double thr = kl_threshold(t);
  const auto ok = [&](double q) { return static_cast<double>(s) * kl(mean, q) <= thr; };
  const std::int64_t fine_per_coarse = 1000;
  const auto total = static_cast<std::int64_t>(std::floor((1.0 - mean) / step + 1e-9));
  std::int64_t k = 0;
  while (k + fine_per_coarse <= total && ok(mean + static_cast<double>(k + fine_per_coarse) * step)) {
    k += fine_per_coarse;
  }
  while (k + 1 <= total && ok(mean + static_cast<double>(k + 1) * step)) ++k;
  return mean + static_cast<double>(k) * step;
}

// G_t straight from the definition.
inline std::int64_t outstanding(std::span<const std::int64_t> delays, std::int64_t t) {
  std::int64_t g = 0;
  for (std::int64_t s = 1; s < t; ++s) g += (s + delays[static_cast<std::size_t>(s - 1)] >= t) ? 1 : 0;
  return g;
}

}  // namespace delaylab::oracle
