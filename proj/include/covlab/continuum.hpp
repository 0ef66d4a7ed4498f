#pragma once

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <limits>
#include <numbers>
#include <optional>
#include <span>
#include <vector>

#include "covlab/distributions.hpp"
#include "covlab/errors.hpp"
#include "covlab/geometry.hpp"
#include "covlab/parallel.hpp"
#include "covlab/random.hpp"
#include "covlab/stats.hpp"

namespace covlab {

enum class ShapeKind { cube, ball };

/// Where the point process lives: all of R^d (the window is padded so shapes
/// anchored outside can reach in) or the orthant starting at the window's low
/// corner (no padding; nothing lives below it).
enum class Domain { whole_space, orthant };

struct PoissonBooleanSpec {
  double intensity = 1.0;
  int dimension = 1;
  ShapeKind shape = ShapeKind::cube;
  RadiusDistribution rho = RadiusDistribution::degenerate(1.0);
  Box window = Box::uniform(1, 0.0, 1.0);
  double margin_quantile = 0.999;
  Domain domain = Domain::whole_space;

  void validate() const {
    require(std::isfinite(intensity) && intensity > 0.0, "intensity", "must be positive");
    require(dimension >= 1 && dimension <= static_cast<int>(kMaxDim), "dimension", "must lie in 1..4");
    require(window.dim() == static_cast<std::size_t>(dimension), "window", "dimension differs from model dimension");
    require(margin_quantile >= 0.9 && margin_quantile < 1.0, "margin_quantile", "must lie in [0.9, 1)");
  }
};

/// A realized Boolean model restricted to shapes that meet the window.
struct Configuration {
  std::vector<Box> boxes;  // cube models
  std::vector<Ball> balls;  // ball models
  std::uint64_t stream_key = 0;
  double margin = 0.0;
  bool truncation_note = false;

  std::size_t size() const { return boxes.size() + balls.size(); }
};

/// Padding used to catch shapes anchored outside the window, and whether the
/// radius law puts mass beyond it.
struct Margin {
  double value = 0.0;
  bool truncated = false;
};

inline Margin edge_margin(const PoissonBooleanSpec& spec) {
  if (spec.domain == Domain::orthant) return {0.0, false};
  double max_side = 0.0;
  for (std::size_t i = 0; i < spec.window.dim(); ++i) max_side = std::max(max_side, spec.window.sides()[i]);
  double m = spec.rho.quantile(spec.margin_quantile);
  bool clamped = false;
  if (m > 10.0 * max_side) {
    m = 10.0 * max_side;
    clamped = true;
  }
  return {m, clamped || spec.rho.tail(m) > 0.0};
}

inline Configuration simulate_configuration(const PoissonBooleanSpec& spec, RandomStream& rng) {
  spec.validate();
  const auto d = static_cast<std::size_t>(spec.dimension);
  const auto margin = edge_margin(spec);

  Point lo(d);
  Point hi(d);
  for (std::size_t i = 0; i < d; ++i) {
    lo[i] = spec.window.lo(i) - margin.value;
    hi[i] = spec.window.hi(i) + (spec.shape == ShapeKind::ball ? margin.value : 0.0);
  }
  double volume = 1.0;
  for (std::size_t i = 0; i < d; ++i) volume *= hi[i] - lo[i];

  Configuration config;
  config.stream_key = rng.key();
  config.margin = margin.value;
  config.truncation_note = margin.truncated;

  const auto n = sample_poisson(spec.intensity * volume, rng);
  for (std::uint64_t k = 0; k < n; ++k) {
    Point x(d);
    for (std::size_t i = 0; i < d; ++i) x[i] = rng.uniform(lo[i], hi[i]);
    const double r = spec.rho.sample(rng);
    if (spec.shape == ShapeKind::cube) {
      Box b = Box::cube(x, r);
      if (b.intersects(spec.window)) config.boxes.push_back(b);
    } else {
      Ball b(x, r);
      if (detail::min_distance_sq(x, spec.window) <= r * r) config.balls.push_back(b);
    }
  }
  return config;
}

/// Independent thinning: each shape is kept with probability `keep`. Thinning
/// a rate-l2 model by l1/l2 gives a rate-l1 model coupled to the original.
inline Configuration thin(const Configuration& config, double keep, RandomStream& rng) {
  Configuration out;
  out.stream_key = config.stream_key;
  out.margin = config.margin;
  out.truncation_note = config.truncation_note;
  for (const auto& b : config.boxes)
    if (rng.bernoulli(keep)) out.boxes.push_back(b);
  for (const auto& b : config.balls)
    if (rng.bernoulli(keep)) out.balls.push_back(b);
  return out;
}

/// E[vacant fraction of the window] = exp(-lambda E[rho^d]) for cubes; zero
/// when the d-th moment diverges.
inline double vacancy_expectation_exact(const PoissonBooleanSpec& spec) {
  spec.validate();
  require(spec.shape == ShapeKind::cube, "shape", "the closed-form vacancy applies to cube shapes");
  const auto m = spec.rho.d_moment(spec.dimension);
  if (m.is_infinite()) return 0.0;
  return std::exp(-spec.intensity * m.value());
}

struct ReplicateRow {
  std::uint64_t replicate = 0;
  double vacancy = 0.0;  // vacant fraction of the window; NaN for ball models
  bool covered = false;
  std::size_t n_shapes = 0;
};

struct MonteCarloEstimate {
  double estimate = 0.0;
  double standard_error = 0.0;
  std::optional<ConfidenceInterval> interval;  // Wilson, for proportions
  std::uint64_t replicates = 0;
  bool truncation_note = false;
  std::vector<ReplicateRow> rows;
};

inline ReplicateRow evaluate_replicate(const PoissonBooleanSpec& spec, std::uint64_t r, RandomStream& rng,
                                       bool want_vacancy, bool want_coverage, bool& truncated) {
  const auto config = simulate_configuration(spec, rng);
  truncated = config.truncation_note;
  ReplicateRow row;
  row.replicate = r;
  row.n_shapes = config.size();
  row.vacancy = std::numeric_limits<double>::quiet_NaN();
  if (spec.shape == ShapeKind::cube) {
    if (want_vacancy) row.vacancy = vacancy_measure_boxes(config.boxes, spec.window) / spec.window.volume();
    if (want_coverage) row.covered = union_covers_box(config.boxes, spec.window).covered();
  } else if (want_coverage) {
    row.covered = union_covers_box_balls(config.balls, spec.window).covered();
  }
  return row;
}

/// Monte Carlo mean of the vacant fraction of the window (cube models).
inline MonteCarloEstimate estimate_vacancy_expectation(const PoissonBooleanSpec& spec, std::uint64_t replicates,
                                                       std::uint64_t seed, unsigned threads = default_thread_count()) {
  spec.validate();
  require(replicates >= 1, "replicates", "must be >= 1");
  require(spec.shape == ShapeKind::cube, "shape", "vacancy measure is exact for cube shapes only");
  struct Out {
    ReplicateRow row;
    bool truncated = false;
  };
  const auto results = run_replicates(seed, replicates, threads, [&](std::size_t r, RandomStream& rng) {
    Out o;
    o.row = evaluate_replicate(spec, r, rng, true, true, o.truncated);
    return o;
  });
  MonteCarloEstimate est;
  est.replicates = replicates;
  std::vector<double> values;
  values.reserve(results.size());
  for (const auto& o : results) {
    values.push_back(o.row.vacancy);
    est.rows.push_back(o.row);
    est.truncation_note = est.truncation_note || o.truncated;
  }
  const auto m = mean_and_se(values);
  est.estimate = m.mean;
  est.standard_error = m.standard_error;
  return est;
}

/// Fraction of replicates in which the union covers the whole window. Ball
/// replicates that stay undecided at the default depth count as not covered.
inline MonteCarloEstimate estimate_full_coverage_probability(const PoissonBooleanSpec& spec,
                                                             std::uint64_t replicates, std::uint64_t seed,
                                                             unsigned threads = default_thread_count()) {
  spec.validate();
  require(replicates >= 1, "replicates", "must be >= 1");
  struct Out {
    ReplicateRow row;
    bool truncated = false;
  };
  const auto results = run_replicates(seed, replicates, threads, [&](std::size_t r, RandomStream& rng) {
    Out o;
    o.row = evaluate_replicate(spec, r, rng, spec.shape == ShapeKind::cube, true, o.truncated);
    return o;
  });
  MonteCarloEstimate est;
  est.replicates = replicates;
  std::uint64_t hits = 0;
  for (const auto& o : results) {
    hits += o.row.covered ? 1 : 0;
    est.rows.push_back(o.row);
    est.truncation_note = est.truncation_note || o.truncated;
  }
  const double n = static_cast<double>(replicates);
  est.estimate = static_cast<double>(hits) / n;
  est.standard_error = std::sqrt(est.estimate * (1.0 - est.estimate) / n);
  est.interval = wilson_interval(hits, replicates);
  return est;
}

/// Volume of the unit ball in R^d.
inline double unit_ball_volume(int d) {
  return std::pow(std::numbers::pi, d / 2.0) / std::tgamma(d / 2.0 + 1.0);
}

/// Critical radius profile ((d / (lambda * pi_d)) log r)^(1/d), r >= e.
inline double h0(double r, double intensity, int d) {
  require(r >= std::numbers::e, "r", "h0 is defined for r >= e");
  require(intensity > 0.0, "intensity", "must be positive");
  require(d >= 1, "dimension", "must be >= 1");
  return std::pow(d / (intensity * unit_ball_volume(d)) * std::log(r), 1.0 / d);
}

/// Non-stationary ball model: the ball at x has radius rho * h(|x|) with
/// h(r) = c^(1/d) h0(max(r, r0)).
struct ScaledRadiusSpec {
  PoissonBooleanSpec base;
  double scale_constant = 1.0;
  double inner_radius = std::numbers::e;

  void validate() const {
    base.validate();
    require(base.shape == ShapeKind::ball, "shape", "the scaled-radius model uses balls");
    require(std::isfinite(scale_constant) && scale_constant > 0.0, "scale_constant", "must be positive");
    require(inner_radius >= std::numbers::e, "inner_radius", "must be >= e");
  }

  double h(double r) const {
    return std::pow(scale_constant, 1.0 / base.dimension) *
           h0(std::max(r, inner_radius), base.intensity, base.dimension);
  }
};

struct Annulus {
  double r_in = 0.0;
  double r_out = 0.0;
};

struct AnnulusCoverage {
  Annulus annulus;
  double covered_fraction = 0.0;  // mean over replicates
  double standard_error = 0.0;
};

struct CoverageProfile {
  std::vector<AnnulusCoverage> annuli;
  std::vector<std::vector<double>> per_replicate;  // [replicate][annulus]
  double simulated_radius = 0.0;
  bool truncation_note = false;
};

inline constexpr std::size_t kProbesPerAnnulus = 1000;

/// Deterministic low-discrepancy probes (Halton, bases 2, 3, 5, 7) inside the
/// annulus r_in <= |x| <= r_out.
inline std::vector<Point> annulus_probes(const Annulus& a, int d, std::size_t count = kProbesPerAnnulus) {
  static constexpr int bases[kMaxDim] = {2, 3, 5, 7};
  auto radical_inverse = [](std::uint64_t i, int base) {
    double f = 1.0;
    double r = 0.0;
    while (i > 0) {
      f /= base;
      r += f * static_cast<double>(i % static_cast<std::uint64_t>(base));
      i /= static_cast<std::uint64_t>(base);
    }
    return r;
  };
  std::vector<Point> probes;
  probes.reserve(count);
  for (std::uint64_t i = 1; probes.size() < count; ++i) {
    Point p(static_cast<std::size_t>(d));
    for (int k = 0; k < d; ++k) p[static_cast<std::size_t>(k)] = a.r_out * (2.0 * radical_inverse(i, bases[k]) - 1.0);
    const double r = p.norm();
    if (r >= a.r_in && r <= a.r_out) probes.push_back(p);
  }
  return probes;
}

namespace detail {

/// Balls sorted by the first center coordinate for a sweep lookup.
class BallIndex {
 public:
  explicit BallIndex(std::vector<Ball> balls) : balls_(std::move(balls)) {
    std::sort(balls_.begin(), balls_.end(), [](const Ball& a, const Ball& b) { return a.center[0] < b.center[0]; });
    for (const auto& b : balls_) max_radius_ = std::max(max_radius_, b.radius);
  }

  bool covers(const Point& p) const {
    auto it = std::lower_bound(balls_.begin(), balls_.end(), p[0] - max_radius_,
                               [](const Ball& b, double v) { return b.center[0] < v; });
    for (; it != balls_.end() && it->center[0] <= p[0] + max_radius_; ++it)
      if (it->contains(p)) return true;
    return false;
  }

 private:
  std::vector<Ball> balls_;
  double max_radius_ = 0.0;
};

}  // namespace detail

/// Simulates the scaled-radius model out to max r_out plus an edge margin and
/// reports, per annulus, the covered fraction of a fixed probe set.
inline CoverageProfile coverage_profile(const ScaledRadiusSpec& spec, std::span<const Annulus> annuli,
                                        std::uint64_t replicates, std::uint64_t seed,
                                        unsigned threads = default_thread_count()) {
  spec.validate();
  require(replicates >= 1, "replicates", "must be >= 1");
  require(!annuli.empty(), "annuli", "at least one annulus is required");
  double r_max = 0.0;
  for (const auto& a : annuli) {
    require(a.r_in >= 0.0 && a.r_in < a.r_out, "annuli", "need 0 <= r_in < r_out");
    r_max = std::max(r_max, a.r_out);
  }
  const int d = spec.base.dimension;
  const auto du = static_cast<std::size_t>(d);

  // A ball centered at distance r_max + m has radius rho * h(r_max + m); pick
  // m as the fixed point of m = rho_q * h(r_max + m).
  const double rho_q = spec.base.rho.quantile(spec.base.margin_quantile);
  double margin = rho_q * spec.h(r_max);
  for (int it = 0; it < 50; ++it) margin = rho_q * spec.h(r_max + margin);
  bool truncated = spec.base.rho.tail(rho_q) > 0.0;
  if (margin > 10.0 * r_max) {
    margin = 10.0 * r_max;
    truncated = true;
  }
  const double radius = r_max + margin;

  std::vector<std::vector<Point>> probes;
  for (const auto& a : annuli) probes.push_back(annulus_probes(a, d));

  auto fractions = run_replicates(seed, replicates, threads, [&](std::size_t, RandomStream& rng) {
    const double volume = std::pow(2.0 * radius, d);
    const auto n = sample_poisson(spec.base.intensity * volume, rng);
    std::vector<Ball> balls;
    for (std::uint64_t k = 0; k < n; ++k) {
      Point x(du);
      for (std::size_t i = 0; i < du; ++i) x[i] = rng.uniform(-radius, radius);
      const double rho = spec.base.rho.sample(rng);
      if (x.norm() <= radius) balls.emplace_back(x, rho * spec.h(x.norm()));
    }
    const detail::BallIndex index(std::move(balls));
    std::vector<double> f;
    for (const auto& ps : probes) {
      std::size_t hit = 0;
      for (const auto& p : ps) hit += index.covers(p) ? 1 : 0;
      f.push_back(static_cast<double>(hit) / static_cast<double>(ps.size()));
    }
    return f;
  });

  CoverageProfile profile;
  profile.simulated_radius = radius;
  profile.truncation_note = truncated;
  for (std::size_t a = 0; a < annuli.size(); ++a) {
    std::vector<double> col;
    for (const auto& f : fractions) col.push_back(f[a]);
    const auto m = mean_and_se(col);
    profile.annuli.push_back({annuli[a], m.mean, m.standard_error});
  }
  profile.per_replicate = std::move(fractions);
  return profile;
}

}  // namespace covlab
