#pragma once

#include <array>
#include <cmath>
#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include "covlab/continuum.hpp"
#include "covlab/distributions.hpp"
#include "covlab/errors.hpp"
#include "covlab/geometry.hpp"
#include "covlab/random.hpp"

namespace covlab {

/// Unit-cell reduction of an orthant cube configuration on [0, n]^d. Cell i
/// is i + (0, 1]^d; it is green when it holds at least one point. Both radii
/// derive from the same m = max rho over the cell's points.
struct LatticeConfiguration {
  int dimension = 1;
  std::int64_t extent = 0;
  std::vector<std::uint8_t> green;
  std::vector<double> max_rho;           // m, green cells only
  std::vector<std::int64_t> rho_upper;   // 2 + floor(m)
  std::vector<std::int64_t> rho_lower;   // max(0, floor(m) - 1)

  std::size_t cell_count() const { return green.size(); }

  std::size_t index(const std::array<std::int64_t, kMaxDim>& cell) const {
    std::size_t idx = 0;
    for (int a = dimension - 1; a >= 0; --a) idx = idx * static_cast<std::size_t>(extent) + static_cast<std::size_t>(cell[a]);
    return idx;
  }

  std::array<std::int64_t, kMaxDim> cell(std::size_t idx) const {
    std::array<std::int64_t, kMaxDim> c{};
    for (int a = 0; a < dimension; ++a) {
      c[a] = static_cast<std::int64_t>(idx % static_cast<std::size_t>(extent));
      idx /= static_cast<std::size_t>(extent);
    }
    return c;
  }
};

namespace detail {

inline std::int64_t orthant_extent(const Box& window) {
  for (std::size_t a = 0; a < window.dim(); ++a) {
    require(window.lo(a) == 0.0, "window", "orthant window must start at the origin");
    require(window.sides()[a] == window.sides()[0], "window", "orthant window must be a cube [0, n]^d");
  }
  const double n = window.sides()[0];
  require(n >= 1.0 && std::floor(n) == n, "window", "orthant window side must be a positive integer");
  return static_cast<std::int64_t>(n);
}

/// Calls fn(linear index) for every cell with lo[a] <= cell[a] <= hi[a],
/// clipped to [0, extent).
template <class Fn>
void for_each_cell_in(const LatticeConfiguration& lat, std::array<std::int64_t, kMaxDim> lo,
                      std::array<std::int64_t, kMaxDim> hi, Fn&& fn) {
  for (int a = 0; a < lat.dimension; ++a) {
    lo[a] = std::max<std::int64_t>(lo[a], 0);
    hi[a] = std::min<std::int64_t>(hi[a], lat.extent - 1);
    if (lo[a] > hi[a]) return;
  }
  auto cur = lo;
  for (;;) {
    fn(lat.index(cur));
    int a = 0;
    while (a < lat.dimension && ++cur[a] > hi[a]) {
      cur[a] = lo[a];
      ++a;
    }
    if (a == lat.dimension) return;
  }
}

}  // namespace detail

inline LatticeConfiguration discretize(const Configuration& config, const Box& window) {
  const auto n = detail::orthant_extent(window);
  LatticeConfiguration lat;
  lat.dimension = static_cast<int>(window.dim());
  lat.extent = n;
  std::size_t cells = 1;
  for (int a = 0; a < lat.dimension; ++a) cells *= static_cast<std::size_t>(n);
  lat.green.assign(cells, 0);
  lat.max_rho.assign(cells, 0.0);
  lat.rho_upper.assign(cells, 0);
  lat.rho_lower.assign(cells, 0);

  for (const auto& b : config.boxes) {
    require(b.dim() == window.dim(), "dimension", "shape and window dimensions differ");
    std::array<std::int64_t, kMaxDim> c{};
    for (int a = 0; a < lat.dimension; ++a) {
      const auto k = static_cast<std::int64_t>(std::ceil(b.lo(a))) - 1;
      c[a] = std::clamp<std::int64_t>(k, 0, n - 1);
    }
    const auto idx = lat.index(c);
    lat.max_rho[idx] = lat.green[idx] ? std::max(lat.max_rho[idx], b.sides()[0]) : b.sides()[0];
    lat.green[idx] = 1;
  }
  for (std::size_t idx = 0; idx < cells; ++idx) {
    if (!lat.green[idx]) continue;
    const auto fl = static_cast<std::int64_t>(std::floor(lat.max_rho[idx]));
    lat.rho_upper[idx] = 2 + fl;
    lat.rho_lower[idx] = std::max<std::int64_t>(0, fl - 1);
  }
  return lat;
}

/// P(max(rho_1..rho_N) <= m | N >= 1) with N ~ Poisson(lambda):
/// (exp(lambda F(m)) - 1) / (exp(lambda) - 1).
inline double conditioned_max_cdf(const RadiusDistribution& rho, double intensity, double m) {
  require(intensity > 0.0, "intensity", "must be positive");
  return std::expm1(intensity * rho.cdf(m)) / std::expm1(intensity);
}

namespace detail {

/// P(max < t | N >= 1).
inline double conditioned_max_below(const RadiusDistribution& rho, double intensity, double t) {
  return std::expm1(intensity * rho.prob_below(t)) / std::expm1(intensity);
}

}  // namespace detail

/// P(rho_upper = k), rho_upper = 2 + floor(max).
inline double rho_upper_pmf(const RadiusDistribution& rho, double intensity, std::int64_t k) {
  if (k < 2) return 0.0;
  const auto t = static_cast<double>(k - 2);
  return detail::conditioned_max_below(rho, intensity, t + 1.0) - detail::conditioned_max_below(rho, intensity, t);
}

/// P(rho_lower = k), rho_lower = max(0, floor(max) - 1).
inline double rho_lower_pmf(const RadiusDistribution& rho, double intensity, std::int64_t k) {
  if (k < 0) return 0.0;
  if (k == 0) return detail::conditioned_max_below(rho, intensity, 2.0);
  const auto t = static_cast<double>(k + 1);
  return detail::conditioned_max_below(rho, intensity, t + 1.0) - detail::conditioned_max_below(rho, intensity, t);
}

/// Draws max(rho_1..rho_N) with N ~ Poisson(lambda) conditioned on N >= 1.
inline double sample_conditioned_max(const RadiusDistribution& rho, double intensity, RandomStream& rng) {
  std::uint64_t n = 0;
  while (n == 0) n = sample_poisson(intensity, rng);
  double m = 0.0;
  for (std::uint64_t k = 0; k < n; ++k) m = std::max(m, rho.sample(rng));
  return m;
}

inline double green_probability(double intensity) { return -std::expm1(-intensity); }

struct SandwichReport {
  bool holds = true;
  std::optional<std::array<std::int64_t, kMaxDim>> violating_cell;
  std::string violation;  // "lower" or "upper"
  std::size_t lower_cells = 0;
  std::size_t poisson_touched_cells = 0;
  std::size_t upper_cells = 0;
};

/// Checks, cell by cell on [0, n]^d, that
///   cells covered by the lower model  are fully inside the Poisson union, and
///   cells the Poisson union touches   are covered by the upper model.
/// Cells are closed unit cubes j + [0, 1]^d. The upper model covers
/// i + [0, rho_upper]^d. The lower model is evaluated on the lattice shifted by
/// one, (i + 1) + [0, rho_lower]^d, since points of cell i sit in (i, i + 1]^d
/// and their cubes start above i; a zero lower radius covers no full cell.
inline SandwichReport sandwich_check(const Configuration& config, const Box& window) {
  const auto lat = discretize(config, window);
  const int d = lat.dimension;
  const std::size_t cells = lat.cell_count();

  std::vector<std::vector<std::uint32_t>> touching(cells);
  std::vector<std::uint8_t> touched(cells, 0);
  for (std::size_t s = 0; s < config.boxes.size(); ++s) {
    const auto& b = config.boxes[s];
    std::array<std::int64_t, kMaxDim> lo{};
    std::array<std::int64_t, kMaxDim> hi{};
    for (int a = 0; a < d; ++a) {
      // open cell (j, j + 1) meets [lo, hi] iff floor(lo) <= j <= ceil(hi) - 1
      lo[a] = static_cast<std::int64_t>(std::floor(b.lo(a)));
      hi[a] = static_cast<std::int64_t>(std::ceil(b.hi(a))) - 1;
    }
    detail::for_each_cell_in(lat, lo, hi, [&](std::size_t idx) {
      touched[idx] = 1;
      touching[idx].push_back(static_cast<std::uint32_t>(s));
    });
  }

  std::vector<std::uint8_t> upper(cells, 0);
  std::vector<std::uint8_t> lower(cells, 0);
  for (std::size_t idx = 0; idx < cells; ++idx) {
    if (!lat.green[idx]) continue;
    const auto c = lat.cell(idx);
    std::array<std::int64_t, kMaxDim> lo{};
    std::array<std::int64_t, kMaxDim> hi{};
    for (int a = 0; a < d; ++a) {
      lo[a] = c[a];
      hi[a] = c[a] + lat.rho_upper[idx] - 1;
    }
    detail::for_each_cell_in(lat, lo, hi, [&](std::size_t j) { upper[j] = 1; });
    if (lat.rho_lower[idx] > 0) {
      for (int a = 0; a < d; ++a) {
        lo[a] = c[a] + 1;
        hi[a] = c[a] + lat.rho_lower[idx];
      }
      detail::for_each_cell_in(lat, lo, hi, [&](std::size_t j) { lower[j] = 1; });
    }
  }

  std::vector<Box> local;
  auto cell_inside_union = [&](std::size_t idx, const Box& unit) {
    const auto& cand = touching[idx];
    for (const auto s : cand) {
      const auto& b = config.boxes[s];
      bool inside = true;
      for (int a = 0; a < d && inside; ++a) inside = b.lo(a) <= unit.lo(a) && unit.hi(a) <= b.hi(a);
      if (inside) return true;
    }
    local.clear();
    for (const auto s : cand) local.push_back(config.boxes[s]);
    return !local.empty() && union_covers_box(local, unit).covered();
  };

  SandwichReport report;
  for (std::size_t idx = 0; idx < cells; ++idx) {
    report.upper_cells += upper[idx];
    report.lower_cells += lower[idx];
    report.poisson_touched_cells += touched[idx];
    if (!report.holds) continue;
    const auto c = lat.cell(idx);
    Point corner(static_cast<std::size_t>(d));
    for (int a = 0; a < d; ++a) corner[static_cast<std::size_t>(a)] = static_cast<double>(c[a]);
    const Box unit = Box::cube(corner, 1.0);

    if (report.holds && lower[idx] && !cell_inside_union(idx, unit)) {
      report.holds = false;
      report.violating_cell = c;
      report.violation = "lower";
    }
    if (report.holds && touched[idx] && !upper[idx]) {
      report.holds = false;
      report.violating_cell = c;
      report.violation = "upper";
    }
  }
  return report;
}

}  // namespace covlab
