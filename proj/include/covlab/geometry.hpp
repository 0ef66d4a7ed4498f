#pragma once

#include <algorithm>
#include <array>
#include <cmath>
#include <cstddef>
#include <initializer_list>
#include <optional>
#include <span>
#include <utility>
#include <vector>

#include "covlab/errors.hpp"

namespace covlab {

inline constexpr std::size_t kMaxDim = 4;

/// Tolerance for degenerate touching. Coordinates closer than this are merged
/// and cells thinner than this carry no measure.
inline constexpr double kGeometryEps = 1e-12;

/// Point in R^d, 1 <= d <= 4.
class Point {
 public:
  Point() = default;
  explicit Point(std::size_t dim) : dim_(dim) { check_dim(dim); }
  Point(std::initializer_list<double> coords) : dim_(coords.size()) {
    check_dim(dim_);
    std::copy(coords.begin(), coords.end(), c_.begin());
  }

  static Point filled(std::size_t dim, double value) {
    Point p(dim);
    std::fill_n(p.c_.begin(), dim, value);
    return p;
  }

  std::size_t dim() const { return dim_; }
  double operator[](std::size_t i) const { return c_[i]; }
  double& operator[](std::size_t i) { return c_[i]; }

  double norm() const {
    double s = 0.0;
    for (std::size_t i = 0; i < dim_; ++i) s += c_[i] * c_[i];
    return std::sqrt(s);
  }

  friend bool operator==(const Point& a, const Point& b) {
    if (a.dim_ != b.dim_) return false;
    for (std::size_t i = 0; i < a.dim_; ++i)
      if (a.c_[i] != b.c_[i]) return false;
    return true;
  }

 private:
  static void check_dim(std::size_t d) {
    require(d >= 1 && d <= kMaxDim, "dimension", "supported dimensions are 1..4");
  }

  std::array<double, kMaxDim> c_{};
  std::size_t dim_ = 0;
};

inline double squared_distance(const Point& a, const Point& b) {
  double s = 0.0;
  for (std::size_t i = 0; i < a.dim(); ++i) s += (a[i] - b[i]) * (a[i] - b[i]);
  return s;
}

/// Closed axis-aligned box corner + [0, sides].
class Box {
 public:
  Box() = default;
  Box(Point corner, Point sides) : corner_(corner), sides_(sides) {
    require(corner.dim() == sides.dim(), "box", "corner and sides differ in dimension");
    for (std::size_t i = 0; i < sides.dim(); ++i) require(sides[i] > 0.0, "box", "sides must be positive");
  }

  /// The cube x + [0, side]^d.
  static Box cube(const Point& corner, double side) { return Box(corner, Point::filled(corner.dim(), side)); }

  /// [lo, hi] in every axis.
  static Box uniform(std::size_t dim, double lo, double hi) {
    return Box(Point::filled(dim, lo), Point::filled(dim, hi - lo));
  }

  static Box from_bounds(const Point& lo, const Point& hi) {
    Point sides(lo.dim());
    for (std::size_t i = 0; i < lo.dim(); ++i) sides[i] = hi[i] - lo[i];
    return Box(lo, sides);
  }

  std::size_t dim() const { return corner_.dim(); }
  const Point& corner() const { return corner_; }
  const Point& sides() const { return sides_; }
  double lo(std::size_t i) const { return corner_[i]; }
  double hi(std::size_t i) const { return corner_[i] + sides_[i]; }

  double volume() const {
    double v = 1.0;
    for (std::size_t i = 0; i < dim(); ++i) v *= sides_[i];
    return v;
  }

  Point center() const {
    Point c(dim());
    for (std::size_t i = 0; i < dim(); ++i) c[i] = corner_[i] + 0.5 * sides_[i];
    return c;
  }

  bool contains(const Point& p) const {
    for (std::size_t i = 0; i < dim(); ++i)
      if (p[i] < lo(i) || p[i] > hi(i)) return false;
    return true;
  }

  /// Closed intersection is nonempty.
  bool intersects(const Box& other) const {
    for (std::size_t i = 0; i < dim(); ++i)
      if (other.hi(i) < lo(i) || other.lo(i) > hi(i)) return false;
    return true;
  }

 private:
  Point corner_;
  Point sides_;
};

struct Ball {
  Point center;
  double radius = 0.0;

  Ball() = default;
  Ball(Point c, double r) : center(c), radius(r) { require(r > 0.0, "ball", "radius must be positive"); }

  std::size_t dim() const { return center.dim(); }
  bool contains(const Point& p) const { return squared_distance(center, p) <= radius * radius; }
};

enum class CoverageStatus { covered, not_covered, unknown_at_resolution };

struct CoverageVerdict {
  CoverageStatus status = CoverageStatus::unknown_at_resolution;
  std::optional<Point> witness;  // set iff not_covered

  bool covered() const { return status == CoverageStatus::covered; }
};

namespace detail {

inline void check_same_dim(std::span<const Box> shapes, const Box& target) {
  for (const auto& s : shapes) require(s.dim() == target.dim(), "dimension", "shape and target dimensions differ");
}

/// Distinct breakpoints of the shapes along `axis`, clipped to the target.
inline std::vector<double> breakpoints(std::span<const Box> shapes, const Box& target, std::size_t axis) {
  std::vector<double> xs{target.lo(axis), target.hi(axis)};
  for (const auto& s : shapes) {
    for (const double v : {s.lo(axis), s.hi(axis)}) {
      if (v > target.lo(axis) && v < target.hi(axis)) xs.push_back(v);
    }
  }
  std::sort(xs.begin(), xs.end());
  std::vector<double> out;
  for (const double v : xs) {
    if (out.empty() || v - out.back() > kGeometryEps) out.push_back(v);
  }
  if (out.size() < 2) out.push_back(target.hi(axis));
  out.back() = target.hi(axis);
  return out;
}

/// Visits every cell of the compressed grid (cells thinner than the epsilon
/// are skipped). The visitor receives the cell's interior midpoint and volume
/// and returns false to stop early.
template <class Visitor>
void for_each_cell(std::span<const Box> shapes, const Box& target, Visitor&& visit) {
  const std::size_t d = target.dim();
  std::array<std::vector<double>, kMaxDim> grid;
  for (std::size_t a = 0; a < d; ++a) grid[a] = breakpoints(shapes, target, a);

  std::array<std::size_t, kMaxDim> idx{};
  for (;;) {
    Point mid(d);
    double vol = 1.0;
    for (std::size_t a = 0; a < d; ++a) {
      const double lo = grid[a][idx[a]];
      const double hi = grid[a][idx[a] + 1];
      mid[a] = 0.5 * (lo + hi);
      vol *= hi - lo;
    }
    if (!visit(mid, vol)) return;
    std::size_t a = 0;
    while (a < d && ++idx[a] + 1 >= grid[a].size()) idx[a++] = 0;
    if (a == d) return;
  }
}

inline bool inside_any(std::span<const Box> shapes, const Point& p) {
  return std::any_of(shapes.begin(), shapes.end(), [&](const Box& b) { return b.contains(p); });
}

}  // namespace detail

/// Exact coverage test for closed boxes. The shape boundaries cut the target
/// into at most (2n+1)^d cells; every cell is either inside some shape or
/// disjoint from all shape interiors, so testing one interior point per cell
/// decides the union. Closed shapes then cover all cell faces as well.
inline CoverageVerdict union_covers_box(std::span<const Box> shapes, const Box& target) {
  detail::check_same_dim(shapes, target);
  CoverageVerdict verdict{CoverageStatus::covered, std::nullopt};
  detail::for_each_cell(shapes, target, [&](const Point& mid, double) {
    if (detail::inside_any(shapes, mid)) return true;
    verdict = {CoverageStatus::not_covered, mid};
    return false;
  });
  return verdict;
}

/// Lebesgue measure of window \ union(shapes), exact up to the cell epsilon.
inline double vacancy_measure_boxes(std::span<const Box> shapes, const Box& window) {
  detail::check_same_dim(shapes, window);
  double vacant = 0.0;
  detail::for_each_cell(shapes, window, [&](const Point& mid, double vol) {
    if (!detail::inside_any(shapes, mid)) vacant += vol;
    return true;
  });
  return vacant;
}

inline constexpr int kDefaultBallDepth = 12;

namespace detail {

inline double max_corner_distance_sq(const Point& c, const Box& cell) {
  double s = 0.0;
  for (std::size_t i = 0; i < cell.dim(); ++i) {
    const double dx = std::max(std::fabs(c[i] - cell.lo(i)), std::fabs(c[i] - cell.hi(i)));
    s += dx * dx;
  }
  return s;
}

inline double min_distance_sq(const Point& c, const Box& cell) {
  double s = 0.0;
  for (std::size_t i = 0; i < cell.dim(); ++i) {
    double dx = 0.0;
    if (c[i] < cell.lo(i)) dx = cell.lo(i) - c[i];
    else if (c[i] > cell.hi(i)) dx = c[i] - cell.hi(i);
    s += dx * dx;
  }
  return s;
}

inline CoverageStatus subdivide(std::span<const Ball> balls, std::vector<std::size_t> candidates, const Box& cell,
                                int depth, std::optional<Point>& witness) {
  // drop balls that miss the cell entirely
  std::erase_if(candidates, [&](std::size_t k) {
    return min_distance_sq(balls[k].center, cell) > balls[k].radius * balls[k].radius;
  });
  const Point mid = cell.center();
  bool mid_covered = false;
  for (const std::size_t k : candidates) {
    const auto& b = balls[k];
    if (max_corner_distance_sq(b.center, cell) <= b.radius * b.radius) return CoverageStatus::covered;
    mid_covered = mid_covered || b.contains(mid);
  }
  if (!mid_covered) {
    witness = mid;
    return CoverageStatus::not_covered;
  }
  if (depth <= 0) return CoverageStatus::unknown_at_resolution;

  const std::size_t d = cell.dim();
  Point half(d);
  for (std::size_t i = 0; i < d; ++i) half[i] = 0.5 * cell.sides()[i];
  bool unknown = false;
  for (std::size_t mask = 0; mask < (std::size_t{1} << d); ++mask) {
    Point corner(d);
    for (std::size_t i = 0; i < d; ++i) corner[i] = cell.lo(i) + (((mask >> i) & 1U) ? half[i] : 0.0);
    const auto s = subdivide(balls, candidates, Box(corner, half), depth - 1, witness);
    if (s == CoverageStatus::not_covered) return s;
    unknown = unknown || s == CoverageStatus::unknown_at_resolution;
  }
  return unknown ? CoverageStatus::unknown_at_resolution : CoverageStatus::covered;
}

}  // namespace detail

/// Certified coverage test for a union of balls by adaptive subdivision. A
/// cell inside a single ball is covered; a cell whose midpoint lies outside
/// every ball yields that midpoint as witness; otherwise the cell is split
/// into 2^d children until `max_depth` is exhausted.
inline CoverageVerdict union_covers_box_balls(std::span<const Ball> balls, const Box& target,
                                              int max_depth = kDefaultBallDepth) {
  require(max_depth >= 1, "max_depth", "must be >= 1");
  for (const auto& b : balls) require(b.dim() == target.dim(), "dimension", "ball and target dimensions differ");
  std::vector<std::size_t> all(balls.size());
  for (std::size_t i = 0; i < all.size(); ++i) all[i] = i;
  std::optional<Point> witness;
  const auto status = detail::subdivide(balls, std::move(all), target, max_depth, witness);
  if (status == CoverageStatus::not_covered) return {status, witness};
  return {status, std::nullopt};
}

struct Interval {
  double lo = 0.0;
  double hi = 0.0;

  double length() const { return hi - lo; }
  friend bool operator==(const Interval&, const Interval&) = default;
};

/// Maximal open subintervals of `target` not covered by the closed
/// `intervals`, in increasing order. Endpoints within the epsilon touch.
inline std::vector<Interval> uncovered_interval_gaps(std::span<const Interval> intervals, Interval target) {
  require(target.lo < target.hi, "target", "interval must satisfy lo < hi");
  std::vector<Interval> sorted;
  sorted.reserve(intervals.size());
  for (const auto& iv : intervals) {
    require(iv.lo < iv.hi, "intervals", "each interval must satisfy lo < hi");
    if (iv.hi >= target.lo && iv.lo <= target.hi) sorted.push_back(iv);
  }
  std::sort(sorted.begin(), sorted.end(), [](const Interval& a, const Interval& b) { return a.lo < b.lo; });

  std::vector<Interval> gaps;
  double reach = target.lo;
  for (const auto& iv : sorted) {
    if (iv.lo - reach > kGeometryEps) gaps.push_back({reach, iv.lo});
    reach = std::max(reach, iv.hi);
    if (reach >= target.hi) break;
  }
  if (target.hi - reach > kGeometryEps) gaps.push_back({reach, target.hi});
  return gaps;
}

}  // namespace covlab
