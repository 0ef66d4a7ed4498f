#pragma once

#include <array>
#include <cmath>
#include <cstdint>
#include <optional>
#include <span>
#include <utility>
#include <vector>

#include "covlab/distributions.hpp"
#include "covlab/errors.hpp"
#include "covlab/random.hpp"

namespace covlab {

enum class InitialState { stationary, start_at_0, start_at_1 };

/// One-dimensional coverage driven by a {0, 1} Markov chain: site i is open
/// when X_i = 1 and then covers [i, i + rho_i].
struct MarkovCoverageSpec {
  double p00 = 0.5;
  double p01 = 0.5;
  double p10 = 0.5;
  double p11 = 0.5;
  RadiusDistribution rho = RadiusDistribution::degenerate(1.0);
  InitialState initial = InitialState::stationary;

  static MarkovCoverageSpec from_exits(double p01, double p10, RadiusDistribution rho,
                                       InitialState initial = InitialState::stationary) {
    return {1.0 - p01, p01, p10, 1.0 - p10, std::move(rho), initial};
  }

  void validate() const {
    require(p00 > 0.0 && p00 < 1.0, "p00", "must lie in (0, 1)");
    require(p10 > 0.0 && p10 < 1.0, "p10", "must lie in (0, 1)");
    require(p01 >= 0.0 && p11 >= 0.0, "p01", "transition probabilities must be nonnegative");
    require(std::fabs(p00 + p01 - 1.0) <= 1e-12, "p01", "p00 + p01 must equal 1");
    require(std::fabs(p10 + p11 - 1.0) <= 1e-12, "p11", "p10 + p11 must equal 1");
    require(rho.integer_valued(), "rho", "Markov model radii must be positive-integer valued");
  }

  /// Long-run fraction of open sites, p01 / (p01 + p10).
  double stationary_open_fraction() const { return p01 / (p01 + p10); }

  /// Law of X_1 as (P(X_1 = 0), P(X_1 = 1)).
  std::array<double, 2> initial_distribution() const {
    switch (initial) {
      case InitialState::start_at_0: return {1.0, 0.0};
      case InitialState::start_at_1: return {0.0, 1.0};
      case InitialState::stationary: break;
    }
    const double pi1 = stationary_open_fraction();
    return {1.0 - pi1, pi1};
  }

  double transition(int from, int to) const {
    if (from == 0) return to == 0 ? p00 : p01;
    return to == 0 ? p10 : p11;
  }

  /// P(an open site fails to reach distance t) = P(rho <= t - 1) = F(t - 1).
  double miss_probability(std::int64_t t) const { return t <= 0 ? 0.0 : rho.cdf(static_cast<double>(t - 1)); }
};

inline double stationary_open_fraction(const MarkovCoverageSpec& spec) {
  spec.validate();
  return spec.stationary_open_fraction();
}

struct RecurrenceRow {
  std::int64_t k = 0;
  double p0 = 0.0;  // P(A_k | X_1 = 0)
  double p1 = 0.0;  // P(A_k | X_1 = 1)
  double p = 0.0;   // P(A_k) under the spec's initial law
};

struct RecurrenceTable {
  std::vector<RecurrenceRow> rows;

  const RecurrenceRow& at(std::int64_t k) const { return rows.at(static_cast<std::size_t>(k - 1)); }
};

/// Forward recurrences for A_k = {k uncovered}:
///   P0(A_{k+1}) = p00 P0(A_k) + p01 P1(A_k)
///   P1(A_{k+1}) = F(k - 1) (p10 P0(A_k) + p11 P1(A_k))
/// from P0(A_1) = 1, P1(A_1) = 0 (an open site covers itself).
inline RecurrenceTable recurrence_table(const MarkovCoverageSpec& spec, std::int64_t K) {
  spec.validate();
  require(K >= 1, "K", "must be >= 1");
  const auto init = spec.initial_distribution();
  RecurrenceTable table;
  table.rows.reserve(static_cast<std::size_t>(K));
  double p0 = 1.0;
  double p1 = 0.0;
  for (std::int64_t k = 1; k <= K; ++k) {
    table.rows.push_back({k, p0, p1, init[0] * p0 + init[1] * p1});
    const double next0 = spec.p00 * p0 + spec.p01 * p1;
    const double next1 = spec.rho.cdf(static_cast<double>(k - 1)) * (spec.p10 * p0 + spec.p11 * p1);
    p0 = next0;
    p1 = next1;
  }
  return table;
}

inline constexpr std::int64_t kMaxEnumeration = 14;

/// P(every target site is uncovered) by summing over all 2^k chain paths,
/// k = largest target. An open site j misses every target q >= j iff q > j
/// for all of them and rho_j <= (nearest target above j) - j - 1.
inline double brute_force_joint_uncovered(const MarkovCoverageSpec& spec, std::span<const std::int64_t> targets) {
  spec.validate();
  std::int64_t k = 0;
  for (const auto q : targets) {
    require(q >= 1, "k", "sites are indexed from 1");
    k = std::max(k, q);
  }
  require(k <= kMaxEnumeration, "k", "enumeration is limited to k <= 14");
  if (k == 0) return 1.0;

  // nearest[j] = smallest target >= j, or 0 when none
  std::vector<std::int64_t> nearest(static_cast<std::size_t>(k + 1), 0);
  for (std::int64_t j = k; j >= 1; --j) {
    nearest[static_cast<std::size_t>(j)] = j < k ? nearest[static_cast<std::size_t>(j + 1)] : 0;
    for (const auto q : targets)
      if (q == j) nearest[static_cast<std::size_t>(j)] = j;
  }

  const auto init = spec.initial_distribution();
  double total = 0.0;
  const std::uint64_t paths = std::uint64_t{1} << k;
  for (std::uint64_t mask = 0; mask < paths; ++mask) {
    double weight = 1.0;
    int prev = -1;
    for (std::int64_t j = 1; j <= k && weight > 0.0; ++j) {
      const int x = static_cast<int>((mask >> (j - 1)) & 1U);
      weight *= prev < 0 ? init[static_cast<std::size_t>(x)] : spec.transition(prev, x);
      prev = x;
      if (x == 1) {
        const auto q = nearest[static_cast<std::size_t>(j)];
        if (q == j) weight = 0.0;
        else if (q > j) weight *= spec.miss_probability(q - j);
      }
    }
    total += weight;
  }
  return total;
}

/// P(A_k) by enumeration.
inline double brute_force_uncovered(const MarkovCoverageSpec& spec, std::int64_t k) {
  return brute_force_joint_uncovered(spec, std::span<const std::int64_t>(&k, 1));
}

/// Renewal gap law u_m = P(site i + m uncovered | site i uncovered), which is
/// P0(A_{m+1}): an uncovered site is closed, and sites before it cannot reach
/// past it.
inline double renewal_gap_probability(const MarkovCoverageSpec& spec, std::int64_t m) {
  require(m >= 0, "m", "must be >= 0");
  if (m == 0) return 1.0;
  return recurrence_table(spec, m + 1).at(m + 1).p0;
}

/// Largest |P(A_i and A_k) - P(A_i) u_{k-i}| over the pairs (i, k), with the
/// joint side enumerated.
inline double markov_renewal_check(const MarkovCoverageSpec& spec,
                                   std::span<const std::pair<std::int64_t, std::int64_t>> pairs) {
  double worst = 0.0;
  for (const auto& [i, k] : pairs) {
    require(i >= 1 && k >= i, "pairs", "need k >= i >= 1");
    const std::int64_t both[2] = {i, k};
    const double joint = brute_force_joint_uncovered(spec, both);
    const double product = brute_force_uncovered(spec, i) * renewal_gap_probability(spec, k - i);
    worst = std::max(worst, std::fabs(joint - product));
  }
  return worst;
}

enum class CoverageClass { covers_almost_surely, does_not_cover_almost_surely, indeterminate };

inline const char* to_string(CoverageClass c) {
  switch (c) {
    case CoverageClass::covers_almost_surely: return "covers-a.s.";
    case CoverageClass::does_not_cover_almost_surely: return "does-not-cover-a.s.";
    case CoverageClass::indeterminate: return "indeterminate";
  }
  return "?";
}

struct ThresholdVerdict {
  CoverageClass status = CoverageClass::indeterminate;
  Extended liminf;      // l
  Extended limsup;      // L
  double open_fraction = 0.0;  // pi_1
  Extended inv_liminf;  // 1 / l
  Extended inv_limsup;  // 1 / L
};

/// Eventual coverage of N: covers a.s. when l > 1 and pi_1 > 1/l; fails a.s.
/// when pi_1 < 1/L (L = 0 reads as 1/L = infinity). Anything else, including
/// the window between 1/l and 1/L, is indeterminate.
inline ThresholdVerdict threshold_classify(const MarkovCoverageSpec& spec) {
  spec.validate();
  const auto regime = spec.rho.tail_regime();
  ThresholdVerdict v;
  v.liminf = regime.liminf;
  v.limsup = regime.limsup;
  v.open_fraction = spec.stationary_open_fraction();
  v.inv_liminf = regime.liminf.reciprocal();
  v.inv_limsup = regime.limsup.reciprocal();
  const bool l_above_one = regime.liminf.is_infinite() || regime.liminf.value() > 1.0;
  if (l_above_one && v.open_fraction > v.inv_liminf.value()) {
    v.status = CoverageClass::covers_almost_surely;
  } else if (v.inv_limsup.is_infinite() || v.open_fraction < v.inv_limsup.value()) {
    v.status = CoverageClass::does_not_cover_almost_surely;
  }
  return v;
}

struct GeneratingFunctionSums {
  double psi0 = 0.0;
  double psi1 = 0.0;
};

/// sum_{k=k0}^{K} P0(A_k) s^k and the same for P1.
inline GeneratingFunctionSums generating_function_partial(const MarkovCoverageSpec& spec, double s, std::int64_t k0,
                                                          std::int64_t K) {
  require(s > 0.0 && s < 1.0, "s", "must lie in (0, 1)");
  require(k0 >= 1 && K >= k0, "k0", "need 1 <= k0 <= K");
  const auto table = recurrence_table(spec, K);
  GeneratingFunctionSums g;
  for (std::int64_t k = k0; k <= K; ++k) {
    const double w = std::pow(s, static_cast<double>(k));
    g.psi0 += table.at(k).p0 * w;
    g.psi1 += table.at(k).p1 * w;
  }
  return g;
}

/// P(s) = (1 - p00 s)(1 - s)(1 - s(1 - p01 - p10)).
inline double p_polynomial(const MarkovCoverageSpec& spec, double s) {
  return (1.0 - spec.p00 * s) * (1.0 - s) * (1.0 - s * (1.0 - spec.p01 - spec.p10));
}

/// Q(s) = (1 - p00 s)^2 (1 - C) p11 + (1 - C) p10 p01 s (1 - p00 s)
///        + p10 s p01 (1 - p00 s) + p10 p00 p01 s^2.
inline double q_polynomial(const MarkovCoverageSpec& spec, double C, double s) {
  const double a = 1.0 - spec.p00 * s;
  return a * a * (1.0 - C) * spec.p11 + (1.0 - C) * spec.p10 * spec.p01 * s * a + spec.p10 * s * spec.p01 * a +
         spec.p10 * spec.p00 * spec.p01 * s * s;
}

/// R(s) = (1 - p00 s)^2 k0 s^{k0-1} P1(A_k0) + (k0 + 1 - C) p10 s^{k0} (1 - p00 s) P0(A_k0)
///        + p10 s^{k0+1} p00 P0(A_k0).
inline double r_polynomial(const MarkovCoverageSpec& spec, double C, std::int64_t k0, double s) {
  require(k0 >= 1, "k0", "must be >= 1");
  const auto row = recurrence_table(spec, k0).at(k0);
  const double a = 1.0 - spec.p00 * s;
  const double kd = static_cast<double>(k0);
  return a * a * kd * std::pow(s, kd - 1.0) * row.p1 + (kd + 1.0 - C) * spec.p10 * std::pow(s, kd) * a * row.p0 +
         spec.p10 * std::pow(s, kd + 1.0) * spec.p00 * row.p0;
}

struct PartialFractions {
  double D = 0.0;  // coefficient of 1 / (1 - p00 s)
  double E = 0.0;  // coefficient of 1 / (1 - s)
  double F = 0.0;  // coefficient of 1 / (1 - s (1 - p01 - p10)); a constant when that factor is 1

  double evaluate(const MarkovCoverageSpec& spec, double s) const {
    const double r = 1.0 - spec.p01 - spec.p10;
    return D / (1.0 - spec.p00 * s) + E / (1.0 - s) + F / (1.0 - r * s);
  }
};

/// Q(s)/P(s) = D/(1 - p00 s) + E/(1 - s) + F/(1 - r s), r = 1 - p01 - p10.
/// Each coefficient is the residue-style cover-up value; F is recovered from
/// the s = 0 identity Q(0) = D + E + F so r = 0 needs no special case.
inline PartialFractions partial_fractions(const MarkovCoverageSpec& spec, double C) {
  spec.validate();
  require(C > 0.0, "C", "must be positive");
  require(spec.p01 + spec.p10 > 0.0, "p01", "p01 + p10 must be positive");
  const double a = spec.p00;
  const double r = 1.0 - spec.p01 - spec.p10;
  PartialFractions pf;
  pf.E = q_polynomial(spec, C, 1.0) / ((1.0 - a) * (1.0 - r));
  pf.D = q_polynomial(spec, C, 1.0 / a) / ((1.0 - 1.0 / a) * (1.0 - r / a));
  pf.F = q_polynomial(spec, C, 0.0) - pf.D - pf.E;
  return pf;
}

/// E = Q(1) / ((1 - p00)(p01 + p10)). Positive iff pi_1 < 1/C.
inline double partial_fraction_E(const MarkovCoverageSpec& spec, double C) { return partial_fractions(spec, C).E; }

struct K0Conditions {
  bool offset_positive = false;      // k0 + (1 - C) > 0
  bool p0_positive = false;          // P0(A_k0) > 0
  bool p1_positive = false;          // P1(A_k0) > 0
  bool tail_bound_holds = false;     // F(k - 1) >= 1 - C/(k + 1) for k0 <= k <= horizon
  bool all() const { return offset_positive && p0_positive && p1_positive && tail_bound_holds; }
};

/// Checks the starting-index conditions for the generating-function argument.
/// The tail bound is an infinite condition; it is checked up to `horizon`.
inline K0Conditions check_k0_conditions(const MarkovCoverageSpec& spec, double C, std::int64_t k0,
                                        std::int64_t horizon) {
  require(k0 >= 1 && horizon >= k0, "k0", "need 1 <= k0 <= horizon");
  const auto row = recurrence_table(spec, k0).at(k0);
  K0Conditions c;
  c.offset_positive = static_cast<double>(k0) + (1.0 - C) > 0.0;
  c.p0_positive = row.p0 > 0.0;
  c.p1_positive = row.p1 > 0.0;
  c.tail_bound_holds = true;
  for (std::int64_t k = k0; k <= horizon && c.tail_bound_holds; ++k) {
    c.tail_bound_holds = spec.rho.cdf(static_cast<double>(k - 1)) >= 1.0 - C / static_cast<double>(k + 1);
  }
  return c;
}

struct MarkovSimulation {
  std::int64_t length = 0;
  std::int64_t guard = 0;
  std::vector<std::int64_t> uncovered;  // sites in [1, n - g], ascending
  std::optional<std::int64_t> last_uncovered;

  std::size_t uncovered_count() const { return uncovered.size(); }
};

/// Realizes X_1..X_n and the radii; site k is covered iff some open i <= k
/// has i + rho_i >= k. Reports sites in [1, n - g], g = ceil(n / 10).
inline MarkovSimulation simulate_markov_coverage(const MarkovCoverageSpec& spec, std::int64_t n, RandomStream& rng) {
  spec.validate();
  require(n >= 2, "n", "need n >= 2");
  MarkovSimulation sim;
  sim.length = n;
  sim.guard = (n + 9) / 10;
  const std::int64_t inner = n - sim.guard;
  const auto init = spec.initial_distribution();
  int x = rng.bernoulli(init[1]) ? 1 : 0;
  double reach = 0.0;
  for (std::int64_t k = 1; k <= inner; ++k) {
    if (k > 1) x = rng.bernoulli(spec.transition(x, 1)) ? 1 : 0;
    if (x == 1) reach = std::max(reach, static_cast<double>(k) + spec.rho.sample(rng));
    if (reach < static_cast<double>(k)) sim.uncovered.push_back(k);
  }
  if (!sim.uncovered.empty()) sim.last_uncovered = sim.uncovered.back();
  return sim;
}

}  // namespace covlab
