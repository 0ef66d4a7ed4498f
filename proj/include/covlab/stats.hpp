#pragma once

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <cstdint>
#include <span>
#include <utility>

#include <boost/math/distributions/normal.hpp>

#include "covlab/errors.hpp"

namespace covlab {

struct ConfidenceInterval {
  double lo = 0.0;
  double hi = 1.0;
};

/// Wilson score interval for a binomial proportion.
inline ConfidenceInterval wilson_interval(std::uint64_t successes, std::uint64_t trials, double level = 0.95) {
  require(trials >= 1, "trials", "must be >= 1");
  require(successes <= trials, "successes", "must not exceed trials");
  require(level > 0.0 && level < 1.0, "level", "must lie in (0, 1)");
  const double z = boost::math::quantile(boost::math::normal(), 0.5 + level / 2.0);
  const double n = static_cast<double>(trials);
  const double phat = static_cast<double>(successes) / n;
  const double z2 = z * z;
  const double denom = 1.0 + z2 / n;
  const double center = (phat + z2 / (2.0 * n)) / denom;
  const double half = z / denom * std::sqrt(phat * (1.0 - phat) / n + z2 / (4.0 * n * n));
  ConfidenceInterval ci{center - half, center + half};
  if (successes == 0) ci.lo = 0.0;
  if (successes == trials) ci.hi = 1.0;
  ci.lo = std::max(0.0, ci.lo);
  ci.hi = std::min(1.0, ci.hi);
  return ci;
}

struct MeanEstimate {
  double mean = 0.0;
  double standard_error = 0.0;
  std::size_t count = 0;
};

/// Sample mean and standard error, summed in index order.
inline MeanEstimate mean_and_se(std::span<const double> xs) {
  MeanEstimate m;
  m.count = xs.size();
  if (xs.empty()) return m;
  double sum = 0.0;
  for (const double x : xs) sum += x;
  m.mean = sum / static_cast<double>(xs.size());
  if (xs.size() < 2) return m;
  double ss = 0.0;
  for (const double x : xs) ss += (x - m.mean) * (x - m.mean);
  const double var = ss / static_cast<double>(xs.size() - 1);
  m.standard_error = std::sqrt(var / static_cast<double>(xs.size()));
  return m;
}

}  // namespace covlab
