#pragma once

#include <algorithm>
#include <array>
#include <cmath>
#include <cstdint>
#include <limits>
#include <optional>
#include <span>
#include <utility>
#include <vector>

#include "covlab/distributions.hpp"
#include "covlab/divergence.hpp"
#include "covlab/errors.hpp"
#include "covlab/random.hpp"

namespace covlab {

/// Discrete coverage model on N^d: site s is open with probability p and then
/// covers s + [0, rho_s]^d, rho a positive-integer law.
struct LatticeSpec {
  int dimension = 2;
  double p = 0.5;
  RadiusDistribution rho = RadiusDistribution::degenerate(1.0);

  void validate() const {
    require(dimension >= 1 && dimension <= 3, "dimension", "lattice model supports d in 1..3");
    require(p > 0.0 && p < 1.0, "p", "open probability must lie in (0, 1)");
    require(rho.integer_valued(), "rho", "lattice radii must be positive-integer valued");
  }

  /// P(rho >= t) = G(t - 1): the chance an open site reaches Chebyshev
  /// distance t. Equals 1 at t = 0.
  double reach_probability(std::int64_t t) const {
    return t <= 0 ? 1.0 : rho.tail(static_cast<double>(t - 1));
  }

  /// log(1 - p P(rho >= t)): one site at distance t fails to cover.
  double log_miss(std::int64_t t) const { return std::log1p(-p * reach_probability(t)); }
};

using LatticePoint = std::array<std::int64_t, 2>;

/// P(every target is uncovered), d = 2, by the independence product over all
/// sites dominated by some target. A site s <= q covers q iff
/// rho_s >= max(q1 - s1, q2 - s2); it misses every target iff rho_s is below
/// the smallest such distance.
inline double joint_uncovered_prob_oracle(const LatticeSpec& spec, std::span<const LatticePoint> targets) {
  spec.validate();
  std::int64_t imax = 0;
  std::int64_t jmax = 0;
  for (const auto& q : targets) {
    require(q[0] >= 1 && q[1] >= 1, "point", "lattice points have coordinates >= 1");
    imax = std::max(imax, q[0]);
    jmax = std::max(jmax, q[1]);
  }
  double log_p = 0.0;
  for (std::int64_t k = 1; k <= imax; ++k) {
    for (std::int64_t l = 1; l <= jmax; ++l) {
      std::int64_t reach = std::numeric_limits<std::int64_t>::max();
      for (const auto& q : targets) {
        if (k <= q[0] && l <= q[1]) reach = std::min(reach, std::max(q[0] - k, q[1] - l));
      }
      if (reach != std::numeric_limits<std::int64_t>::max()) log_p += spec.log_miss(reach);
    }
  }
  return std::exp(log_p);
}

/// P((i, j) uncovered), d = 2, by the brute-force product over the i x j
/// dominated sites.
inline double uncovered_prob_oracle(const LatticeSpec& spec, std::int64_t i, std::int64_t j) {
  const LatticePoint q{i, j};
  return joint_uncovered_prob_oracle(spec, std::span<const LatticePoint>(&q, 1));
}

namespace detail {

/// log P(A(i, j)) for i >= j >= 1 grouped by distance t: distance 0 is the
/// point itself, 1 <= t <= j-1 holds 2t+1 sites (a full quadrant ring), and
/// j <= t <= i-1 holds j sites (one column of the strip).
inline double log_uncovered_regrouped(const LatticeSpec& spec, std::int64_t i, std::int64_t j) {
  double s = spec.log_miss(0);
  for (std::int64_t t = 1; t <= j - 1; ++t) s += static_cast<double>(2 * t + 1) * spec.log_miss(t);
  for (std::int64_t t = j; t <= i - 1; ++t) s += static_cast<double>(j) * spec.log_miss(t);
  return s;
}

}  // namespace detail

/// Closed form for P(A(i, j)), i > j >= 1, d = 2:
///   (1 - p) prod_{t=1}^{j-1} (1 - p P(rho >= t))^{2t+1} prod_{t=j}^{i-1} (1 - p P(rho >= t))^j
/// The second product runs over the i - j strip columns at distances j..i-1.
inline double uncovered_prob_formula(const LatticeSpec& spec, std::int64_t i, std::int64_t j) {
  spec.validate();
  require(spec.dimension == 2, "dimension", "the closed form is for d = 2");
  require(j >= 1 && i > j, "point", "closed form requires i > j >= 1");
  return std::exp(detail::log_uncovered_regrouped(spec, i, j));
}

/// log P(A(i, j)) for all i, j >= 1 using the symmetry A(i, j) ~ A(j, i).
inline double log_uncovered_prob(const LatticeSpec& spec, std::int64_t i, std::int64_t j) {
  require(i >= 1 && j >= 1, "point", "lattice points have coordinates >= 1");
  return i >= j ? detail::log_uncovered_regrouped(spec, i, j) : detail::log_uncovered_regrouped(spec, j, i);
}

/// log P(A(i, j)) for i = 1..count along row j.
inline std::vector<double> row_log_terms(const LatticeSpec& spec, std::int64_t j, std::int64_t count) {
  spec.validate();
  require(j >= 1, "j", "row index must be >= 1");
  std::vector<double> logs;
  logs.reserve(static_cast<std::size_t>(std::max<std::int64_t>(count, 0)));
  for (std::int64_t i = 1; i <= std::min(count, j); ++i) logs.push_back(log_uncovered_prob(spec, i, j));
  if (count > j) {
    double cur = logs.back();
    for (std::int64_t i = j + 1; i <= count; ++i) {
      cur += static_cast<double>(j) * spec.log_miss(i - 1);
      logs.push_back(cur);
    }
  }
  return logs;
}

/// Partial sums sum_{i <= I} P(A(i, j)) for I = 1..upto.
inline std::vector<double> series_partial_sums(const LatticeSpec& spec, std::int64_t j, std::int64_t upto) {
  require(upto >= j + 1, "I", "need I >= j + 1");
  const auto logs = row_log_terms(spec, j, upto);
  std::vector<double> sums(logs.size());
  double s = 0.0;
  for (std::size_t k = 0; k < logs.size(); ++k) {
    s += std::exp(logs[k]);
    sums[k] = s;
  }
  return sums;
}

/// Gauss-test verdict for sum_i P(A(i, j)) fitted over m in [m_lo, m_hi].
inline DivergenceVerdict divergence_diagnostic(const LatticeSpec& spec, std::int64_t j, std::int64_t m_lo,
                                               std::int64_t m_hi) {
  require(m_lo >= 1 && m_lo <= m_hi, "m_range", "need 1 <= m_lo <= m_hi");
  const auto logs = row_log_terms(spec, j, m_hi + 1);
  return diagnose_log_series(logs, 1, m_lo, m_hi);
}

/// Largest |P(A(k,j) and A(i,j)) - P(A(k-i,j)) P(A(i,j))| over the pairs,
/// with P(A(0, j)) = 1. The joint side is the independence product.
inline double renewal_identity_check(const LatticeSpec& spec, std::int64_t j,
                                     std::span<const std::pair<std::int64_t, std::int64_t>> pairs) {
  double worst = 0.0;
  for (const auto& [i, k] : pairs) {
    require(i >= 1 && k >= i, "pairs", "need k >= i >= 1");
    const LatticePoint both[2] = {{i, j}, {k, j}};
    const double joint = joint_uncovered_prob_oracle(spec, both);
    const double gap = k == i ? 1.0 : uncovered_prob_oracle(spec, k - i, j);
    const double product = gap * uncovered_prob_oracle(spec, i, j);
    worst = std::max(worst, std::fabs(joint - product));
  }
  return worst;
}

struct LatticeSimulation {
  std::int64_t extent = 0;
  std::int64_t guard = 0;
  /// Uncovered points of [1, n - g]^d, 1-based, axis 0 fastest.
  std::vector<std::array<std::int64_t, 3>> uncovered;
  /// Smallest t with [t, n - g]^d fully covered; empty when even the far
  /// corner is uncovered.
  std::optional<std::int64_t> t_hat;
  /// t_hat exists and lies in the lower half of the inner box, so the covered
  /// block [t_hat, n - g]^d is at least half the inner extent per axis.
  bool eventually_covered = false;
  bool truncation_note = false;
};

/// Realizes the open field and radii on {1..n}^d and reports the uncovered
/// points inside the guard-banded box [1, n - g]^d, g = ceil(n / 10).
inline LatticeSimulation simulate_lattice(const LatticeSpec& spec, std::int64_t n, RandomStream& rng) {
  spec.validate();
  require(n >= 4, "extent", "need n >= 4");
  const int d = spec.dimension;
  const auto un = static_cast<std::size_t>(n);
  std::size_t cells = 1;
  for (int a = 0; a < d; ++a) cells *= un;

  // reach_end[c] = furthest axis-0 position reached by a square whose
  // axis-0 start is c's axis-0 coordinate and whose other-axis span contains
  // c's remaining coordinates; -1 when none.
  std::vector<std::int64_t> reach_end(cells, -1);
  std::array<std::int64_t, 3> pos{};
  for (std::size_t idx = 0; idx < cells; ++idx) {
    const bool open = rng.bernoulli(spec.p);
    const double r_draw = spec.rho.sample(rng);
    if (!open) continue;
    const auto r = static_cast<std::int64_t>(std::min(r_draw, static_cast<double>(n)));
    std::size_t rem = idx;
    for (int a = 0; a < d; ++a) {
      pos[static_cast<std::size_t>(a)] = static_cast<std::int64_t>(rem % un);
      rem /= un;
    }
    const std::int64_t end = pos[0] + r;
    const std::int64_t y_hi = d >= 2 ? std::min(pos[1] + r, n - 1) : pos[1];
    const std::int64_t z_hi = d >= 3 ? std::min(pos[2] + r, n - 1) : pos[2];
    for (std::int64_t z = pos[2]; z <= z_hi; ++z) {
      for (std::int64_t y = pos[1]; y <= y_hi; ++y) {
        auto& e = reach_end[static_cast<std::size_t>(pos[0]) + un * (static_cast<std::size_t>(y) + un * static_cast<std::size_t>(z))];
        e = std::max(e, end);
      }
    }
  }

  LatticeSimulation sim;
  sim.extent = n;
  sim.guard = (n + 9) / 10;
  sim.truncation_note = spec.rho.tail(static_cast<double>(sim.guard)) > 1e-6;
  const std::int64_t inner = n - sim.guard;
  const std::int64_t lines_y = d >= 2 ? inner : 1;
  const std::int64_t lines_z = d >= 3 ? inner : 1;
  std::int64_t worst_min = 0;  // max over uncovered points of their smallest coordinate
  for (std::int64_t z = 0; z < lines_z; ++z) {
    for (std::int64_t y = 0; y < lines_y; ++y) {
      std::int64_t cur = -1;
      const std::size_t base = un * (static_cast<std::size_t>(y) + un * static_cast<std::size_t>(z));
      for (std::int64_t x = 0; x < inner; ++x) {
        cur = std::max(cur, reach_end[base + static_cast<std::size_t>(x)]);
        if (cur >= x) continue;
        std::array<std::int64_t, 3> p{x + 1, d >= 2 ? y + 1 : 0, d >= 3 ? z + 1 : 0};
        sim.uncovered.push_back(p);
        std::int64_t m = p[0];
        if (d >= 2) m = std::min(m, p[1]);
        if (d >= 3) m = std::min(m, p[2]);
        worst_min = std::max(worst_min, m);
      }
    }
  }
  const std::int64_t t = worst_min + 1;
  if (t <= inner) sim.t_hat = t;
  sim.eventually_covered = sim.t_hat.has_value() && 2 * *sim.t_hat <= inner;
  return sim;
}

}  // namespace covlab
