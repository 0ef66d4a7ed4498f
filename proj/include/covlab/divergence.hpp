#pragma once

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <limits>
#include <span>
#include <string>
#include <utility>
#include <vector>

#include "covlab/errors.hpp"

namespace covlab {

enum class SeriesStatus { diverges, converges, indeterminate };

inline const char* to_string(SeriesStatus s) {
  switch (s) {
    case SeriesStatus::diverges: return "diverges";
    case SeriesStatus::converges: return "converges";
    case SeriesStatus::indeterminate: return "indeterminate";
  }
  return "?";
}

/// Partial sum S_m of a series, recorded at selected indices.
struct PartialSumPoint {
  std::int64_t index = 0;
  double partial_sum = 0.0;
};

struct DivergenceVerdict {
  SeriesStatus status = SeriesStatus::indeterminate;
  /// Decisive exponent. For term-ratio fits this is the Gauss exponent c in
  /// e_{m+1}/e_m = 1 - c/m + O(1/m^2); the series diverges iff c <= 1.
  double exponent = std::numeric_limits<double>::quiet_NaN();
  std::vector<PartialSumPoint> evidence;
  std::string note;
};

/// Heuristic band around the Gauss boundary c = 1. A finite range of terms
/// cannot separate c slightly below 1 from slightly above.
inline constexpr double kGaussLowerBand = 0.9;
inline constexpr double kGaussUpperBand = 1.1;

inline SeriesStatus classify_gauss_exponent(double c) {
  if (c <= kGaussLowerBand) return SeriesStatus::diverges;
  if (c >= kGaussUpperBand) return SeriesStatus::converges;
  return SeriesStatus::indeterminate;
}

/// Indices 1, 2, 4, 8, ... and the last index, for compact partial-sum traces.
inline std::vector<PartialSumPoint> partial_sum_trace(std::span<const double> terms, std::int64_t first_index) {
  std::vector<PartialSumPoint> trace;
  double s = 0.0;
  std::int64_t next = 1;
  for (std::size_t k = 0; k < terms.size(); ++k) {
    s += terms[k];
    const auto count = static_cast<std::int64_t>(k + 1);
    if (count == next || k + 1 == terms.size()) {
      trace.push_back({first_index + static_cast<std::int64_t>(k), s});
      if (count == next) next *= 2;
    }
  }
  return trace;
}

/// Gauss-test diagnostic on a positive series given by its log-terms:
/// log_terms[k] = log e_{first_index + k}. Fits c as the median of
/// m * (1 - e_{m+1} / e_m) over m in [m_lo, m_hi]. All-zero terms count as a
/// convergent series.
inline DivergenceVerdict diagnose_log_series(std::span<const double> log_terms, std::int64_t first_index,
                                             std::int64_t m_lo, std::int64_t m_hi) {
  require(m_lo >= first_index && m_lo <= m_hi, "m_range", "need first_index <= m_lo <= m_hi");
  require(m_hi + 1 - first_index < static_cast<std::int64_t>(log_terms.size()), "m_range",
          "m_hi + 1 must lie within the computed terms");

  DivergenceVerdict v;
  std::vector<double> terms(log_terms.size());
  std::transform(log_terms.begin(), log_terms.end(), terms.begin(), [](double l) { return std::exp(l); });
  v.evidence = partial_sum_trace(terms, first_index);

  std::vector<double> fits;
  for (std::int64_t m = m_lo; m <= m_hi; ++m) {
    const double a = log_terms[static_cast<std::size_t>(m - first_index)];
    const double b = log_terms[static_cast<std::size_t>(m + 1 - first_index)];
    if (!std::isfinite(a) || !std::isfinite(b)) continue;
    fits.push_back(static_cast<double>(m) * -std::expm1(b - a));
  }
  if (fits.empty()) {
    v.status = SeriesStatus::converges;
    v.exponent = std::numeric_limits<double>::infinity();
    v.note = "all terms vanish in the fitted range";
    return v;
  }
  const auto mid = fits.begin() + static_cast<std::ptrdiff_t>(fits.size() / 2);
  std::nth_element(fits.begin(), mid, fits.end());
  double c = *mid;
  if (fits.size() % 2 == 0) {
    const double lower = *std::max_element(fits.begin(), mid);
    c = 0.5 * (c + lower);
  }
  v.exponent = c;
  v.status = classify_gauss_exponent(c);
  return v;
}

/// Same as diagnose_log_series for plain positive terms.
inline DivergenceVerdict diagnose_series(std::span<const double> terms, std::int64_t first_index, std::int64_t m_lo,
                                         std::int64_t m_hi) {
  std::vector<double> logs(terms.size());
  std::transform(terms.begin(), terms.end(), logs.begin(), [](double t) {
    return t > 0.0 ? std::log(t) : -std::numeric_limits<double>::infinity();
  });
  return diagnose_log_series(logs, first_index, m_lo, m_hi);
}

}  // namespace covlab
