#pragma once

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <limits>
#include <vector>

#include "covlab/distributions.hpp"
#include "covlab/divergence.hpp"
#include "covlab/errors.hpp"
#include "covlab/geometry.hpp"
#include "covlab/random.hpp"

namespace covlab {

/// Length measure mu of an interval process on the line: intervals (x, x + y)
/// with (x, y) Poisson of intensity Lebesgue x mu. Atoms carry the full mass
/// at a length; pieces carry density beta * y^(-gamma) on (a, b), b may be
/// infinite.
struct LengthMeasure {
  struct Atom {
    double y = 0.0;
    double mass = 0.0;
  };
  struct Piece {
    double a = 0.0;
    double b = std::numeric_limits<double>::infinity();
    double beta = 0.0;
    double gamma = 0.0;
  };

  std::vector<Atom> atoms;
  std::vector<Piece> pieces;

  void validate() const {
    for (const auto& at : atoms) require(at.y > 0.0 && at.mass > 0.0, "atoms", "atom length and mass must be positive");
    auto sorted = pieces;
    for (const auto& pc : sorted) {
      require(pc.a >= 0.0 && pc.a < pc.b, "pieces", "piece needs 0 <= a < b");
      require(pc.beta > 0.0 && pc.gamma > 0.0, "pieces", "beta and gamma must be positive");
    }
    std::sort(sorted.begin(), sorted.end(), [](const Piece& l, const Piece& r) { return l.a < r.a; });
    for (std::size_t k = 1; k < sorted.size(); ++k)
      require(sorted[k].a >= sorted[k - 1].b, "pieces", "piece intervals must be disjoint");
  }
};

namespace detail {

/// int_lo^hi y^p dy for 0 < lo <= hi (hi may be infinite).
inline double power_integral(double p, double lo, double hi) {
  if (lo >= hi) return 0.0;
  if (std::isinf(hi)) {
    if (p >= -1.0) return std::numeric_limits<double>::infinity();
    return -std::pow(lo, p + 1.0) / (p + 1.0);
  }
  if (p == -1.0) return std::log(hi / lo);
  return (std::pow(hi, p + 1.0) - std::pow(lo, p + 1.0)) / (p + 1.0);
}

}  // namespace detail

/// int_x^inf (y - x) mu(dy), closed form per atom and per piece; +infinity
/// when an unbounded piece has gamma <= 2.
inline Extended shepp_inner(const LengthMeasure& mu, double x) {
  require(x > 0.0 && x < 1.0, "x", "must lie in (0, 1)");
  double total = 0.0;
  for (const auto& at : mu.atoms)
    if (at.y > x) total += (at.y - x) * at.mass;
  for (const auto& pc : mu.pieces) {
    const double lo = std::max(pc.a, x);
    if (lo >= pc.b) continue;
    if (std::isinf(pc.b) && pc.gamma <= 2.0) return Extended::infinity();
    total += pc.beta * (detail::power_integral(1.0 - pc.gamma, lo, pc.b) - x * detail::power_integral(-pc.gamma, lo, pc.b));
  }
  return Extended(total);
}

namespace detail {

/// int_{2^-k}^1 exp(inner(x)) dx for k = 1..levels, trapezoid in u = -ln x.
inline std::vector<PartialSumPoint> shepp_partial_integrals(const LengthMeasure& mu, int levels) {
  constexpr int kStepsPerLevel = 64;
  const double du = std::log(2.0) / kStepsPerLevel;
  auto integrand = [&](double u) {
    const double x = std::min(std::exp(-u), 1.0 - 1e-15);
    const auto inner = shepp_inner(mu, x);
    return inner.is_infinite() ? std::numeric_limits<double>::infinity() : std::exp(inner.value() - u);
  };
  std::vector<PartialSumPoint> out;
  double acc = 0.0;
  double prev = integrand(0.0);
  for (int k = 1; k <= levels; ++k) {
    for (int s = 1; s <= kStepsPerLevel; ++s) {
      const double cur = integrand(du * ((k - 1) * kStepsPerLevel + s));
      acc += 0.5 * du * (prev + cur);
      prev = cur;
    }
    out.push_back({k, acc});
  }
  return out;
}

}  // namespace detail

/// Divergence of int_0^1 exp(shepp_inner(x)) dx. Divergence means the line
/// is covered almost surely. Decided from the behavior as x -> 0+:
///   int y mu(dy) finite        -> bounded integrand, converges
///   inner infinite             -> diverges
///   piece at 0 with gamma > 2  -> inner grows like a power of 1/x, diverges
///   piece at 0 with gamma = 2  -> integrand ~ x^(-beta), exponent fitted
///                                 numerically; diverges iff it is >= 1
inline DivergenceVerdict shepp_criterion(const LengthMeasure& mu) {
  mu.validate();
  DivergenceVerdict v;
  v.evidence = detail::shepp_partial_integrals(mu, 20);

  for (const auto& pc : mu.pieces) {
    if (std::isinf(pc.b) && pc.gamma <= 2.0) {
      v.status = SeriesStatus::diverges;
      v.exponent = std::numeric_limits<double>::infinity();
      v.note = "inner integral is infinite";
      return v;
    }
  }
  const LengthMeasure::Piece* at_zero = nullptr;
  for (const auto& pc : mu.pieces)
    if (pc.a == 0.0) at_zero = &pc;

  if (at_zero == nullptr || at_zero->gamma < 2.0) {
    v.status = SeriesStatus::converges;
    v.exponent = 0.0;
    v.note = "integrand bounded near 0";
    return v;
  }
  if (at_zero->gamma > 2.0) {
    v.status = SeriesStatus::diverges;
    v.exponent = std::numeric_limits<double>::infinity();
    v.note = "log-integrand grows like a power of 1/x";
    return v;
  }
  // log exp(inner(x)) = -e log x + O(1): fit e from two small x.
  const double x1 = 1e-6;
  const double x2 = 1e-9;
  const double e = (shepp_inner(mu, x2).value() - shepp_inner(mu, x1).value()) / std::log(x1 / x2);
  v.exponent = e;
  if (e >= kGaussUpperBand) v.status = SeriesStatus::diverges;
  else if (e <= kGaussLowerBand) v.status = SeriesStatus::converges;
  else v.status = SeriesStatus::indeterminate;
  v.note = "integrand ~ x^(-exponent) near 0";
  return v;
}

/// Lengths t_1 >= t_2 >= ... of the level-i interval processes, each of
/// intensity lambda. Either an explicit finite list or t_n = c / n^gamma.
struct CantorSequence {
  enum class Form { explicit_list, parametric };

  Form form = Form::parametric;
  std::vector<double> terms;
  double c = 1.0;
  double gamma = 1.0;
  double intensity = 1.0;

  static CantorSequence power_law(double c, double gamma, double intensity) {
    return {Form::parametric, {}, c, gamma, intensity};
  }
  static CantorSequence list(std::vector<double> terms, double intensity) {
    return {Form::explicit_list, std::move(terms), 0.0, 0.0, intensity};
  }

  void validate() const {
    require(intensity > 0.0, "intensity", "must be positive");
    if (form == Form::parametric) {
      require(c > 0.0 && c <= 1.0, "c", "must lie in (0, 1]");
      require(gamma > 0.0, "gamma", "must be positive");
      return;
    }
    require(!terms.empty(), "terms", "list must be nonempty");
    require(terms.front() <= 1.0, "terms", "t_1 must be <= 1");
    for (std::size_t k = 0; k < terms.size(); ++k) {
      require(terms[k] > 0.0, "terms", "terms must be positive");
      require(k == 0 || terms[k] <= terms[k - 1], "terms", "terms must be nonincreasing");
    }
  }

  std::int64_t available() const {
    return form == Form::parametric ? std::numeric_limits<std::int64_t>::max()
                                    : static_cast<std::int64_t>(terms.size());
  }

  /// t_n, n >= 1.
  double term(std::int64_t n) const {
    if (form == Form::parametric) return c / std::pow(static_cast<double>(n), gamma);
    return terms.at(static_cast<std::size_t>(n - 1));
  }
};

inline constexpr std::int64_t kCantorTraceTerms = 1 << 16;

/// Sum t_i = infinity (the residual set has measure zero) decided
/// analytically for t_n = c / n^gamma: diverges iff gamma <= 1. Lists are
/// indeterminate and carry their partial sums.
inline DivergenceVerdict cantor_measure_criterion(const CantorSequence& seq) {
  seq.validate();
  DivergenceVerdict v;
  const auto count = std::min(seq.available(), kCantorTraceTerms);
  std::vector<double> t(static_cast<std::size_t>(count));
  for (std::int64_t n = 1; n <= count; ++n) t[static_cast<std::size_t>(n - 1)] = seq.term(n);
  v.evidence = partial_sum_trace(t, 1);
  if (seq.form == CantorSequence::Form::explicit_list) {
    v.note = "finite list; partial sums only";
    return v;
  }
  v.exponent = seq.gamma;
  v.status = seq.gamma <= 1.0 ? SeriesStatus::diverges : SeriesStatus::converges;
  v.note = "t_n = c / n^gamma";
  return v;
}

/// Divergence of sum n^-2 exp(lambda (t_1 + ... + t_n)); divergence means the
/// residual set is empty almost surely. For t_n = c / n the partial sums are
/// c ln n + O(1), so the terms behave like n^(lambda c - 2) and the series
/// diverges iff lambda c >= 1. gamma < 1 diverges (stretched exponential
/// growth), gamma > 1 converges (bounded exponent).
inline DivergenceVerdict cantor_empty_criterion(const CantorSequence& seq) {
  seq.validate();
  DivergenceVerdict v;
  const auto count = std::min(seq.available(), kCantorTraceTerms);
  std::vector<double> terms(static_cast<std::size_t>(count));
  double s = 0.0;
  for (std::int64_t n = 1; n <= count; ++n) {
    s += seq.term(n);
    terms[static_cast<std::size_t>(n - 1)] = std::exp(seq.intensity * s - 2.0 * std::log(static_cast<double>(n)));
  }
  v.evidence = partial_sum_trace(terms, 1);
  if (seq.form == CantorSequence::Form::explicit_list) {
    v.note = "finite list; partial sums only";
    return v;
  }
  if (seq.gamma == 1.0) {
    const double lc = seq.intensity * seq.c;
    v.exponent = lc;
    v.status = lc >= 1.0 ? SeriesStatus::diverges : SeriesStatus::converges;
    v.note = "terms ~ n^(lambda c - 2)";
  } else if (seq.gamma < 1.0) {
    v.exponent = std::numeric_limits<double>::infinity();
    v.status = SeriesStatus::diverges;
    v.note = "lambda sum t_i grows like n^(1 - gamma)";
  } else {
    v.exponent = 0.0;
    v.status = SeriesStatus::converges;
    v.note = "sum t_i finite; terms ~ n^-2";
  }
  return v;
}

struct CantorSample {
  double vacant_measure = 0.0;
  std::vector<Interval> gaps;
  std::uint64_t intervals = 0;
};

/// Superposes levels 1..K on the unit torus [0, 1): level i has Poisson(lambda)
/// left endpoints, uniform, each carrying (x, x + t_i) wrapped mod 1. Levels
/// are drawn in order from one stream, so runs with the same stream and a
/// larger K extend the smaller-K realization.
inline CantorSample simulate_cantor(const CantorSequence& seq, std::int64_t K, RandomStream& rng) {
  seq.validate();
  require(K >= 1, "K", "must be >= 1");
  require(K <= seq.available(), "K", "list has fewer than K terms");
  std::vector<Interval> pieces;
  CantorSample sample;
  for (std::int64_t i = 1; i <= K; ++i) {
    const double t = seq.term(i);
    const auto n = sample_poisson(seq.intensity, rng);
    sample.intervals += n;
    for (std::uint64_t k = 0; k < n; ++k) {
      const double x = rng.uniform();
      if (t >= 1.0) {
        pieces.push_back({0.0, 1.0});
      } else if (x + t <= 1.0) {
        pieces.push_back({x, x + t});
      } else {
        pieces.push_back({x, 1.0});
        pieces.push_back({0.0, x + t - 1.0});
      }
    }
  }
  // drop zero-length wrap remnants
  std::erase_if(pieces, [](const Interval& iv) { return !(iv.lo < iv.hi); });
  sample.gaps = uncovered_interval_gaps(pieces, {0.0, 1.0});
  for (const auto& g : sample.gaps) sample.vacant_measure += g.length();
  return sample;
}

}  // namespace covlab
