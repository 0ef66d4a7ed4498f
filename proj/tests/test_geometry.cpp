#include <gtest/gtest.h>

#include <cmath>
#include <vector>

#include "covlab/geometry.hpp"
#include "covlab/random.hpp"

using covlab::Ball;
using covlab::Box;
using covlab::CoverageStatus;
using covlab::Interval;
using covlab::Point;

namespace {

Box box2(double x0, double x1, double y0, double y1) { return Box::from_bounds({x0, y0}, {x1, y1}); }

bool outside_all(const std::vector<Box>& shapes, const Point& p) {
  for (const auto& s : shapes)
    if (s.contains(p)) return false;
  return true;
}

std::vector<Box> random_boxes(covlab::RandomStream& rng, std::size_t dim, int count, double span) {
  std::vector<Box> out;
  for (int k = 0; k < count; ++k) {
    Point c(dim);
    Point s(dim);
    for (std::size_t a = 0; a < dim; ++a) {
      c[a] = rng.uniform(-0.2, span);
      s[a] = rng.uniform(0.05, 0.6);
    }
    out.emplace_back(c, s);
  }
  return out;
}

}  // namespace

TEST(BoxCoverage, Identity) {
  const std::vector<Box> shapes{Box::uniform(2, 0, 1)};
  EXPECT_EQ(covlab::union_covers_box(shapes, Box::uniform(2, 0, 1)).status, CoverageStatus::covered);
}

TEST(BoxCoverage, AbuttingClosedBoxesTile) {
  const std::vector<Box> shapes{box2(0, 1, 0, 2), box2(1, 2, 0, 2)};
  EXPECT_TRUE(covlab::union_covers_box(shapes, Box::uniform(2, 0, 2)).covered());
}

TEST(BoxCoverage, GapYieldsValidWitness) {
  const std::vector<Box> shapes{box2(0, 0.9, 0, 0.9), box2(1.1, 2, 1.1, 2)};
  const auto target = Box::uniform(2, 0, 2);
  const auto v = covlab::union_covers_box(shapes, target);
  ASSERT_EQ(v.status, CoverageStatus::not_covered);
  ASSERT_TRUE(v.witness.has_value());
  EXPECT_TRUE(target.contains(*v.witness));
  EXPECT_TRUE(outside_all(shapes, *v.witness));
  // the central gap itself is uncovered
  EXPECT_TRUE(outside_all(shapes, Point{1.0, 1.0}));
}

TEST(BoxCoverage, DimensionMismatchThrows) {
  const std::vector<Box> shapes{Box::uniform(1, 0, 1)};
  EXPECT_THROW(covlab::union_covers_box(shapes, Box::uniform(2, 0, 1)), covlab::ValidationError);
  EXPECT_THROW(covlab::vacancy_measure_boxes(shapes, Box::uniform(3, 0, 1)), covlab::ValidationError);
}

TEST(Vacancy, FrozenValues) {
  EXPECT_DOUBLE_EQ(covlab::vacancy_measure_boxes({}, Box::uniform(2, 0, 1)), 1.0);
  const std::vector<Box> half{box2(0, 1, 0, 0.5)};
  EXPECT_DOUBLE_EQ(covlab::vacancy_measure_boxes(half, Box::uniform(2, 0, 1)), 0.5);
  const std::vector<Box> two{box2(0, 0.6, 0, 0.6), box2(0.4, 1, 0.4, 1)};
  EXPECT_NEAR(covlab::vacancy_measure_boxes(two, Box::uniform(2, 0, 1)), 0.32, 1e-12);
}

TEST(Vacancy, MatchesInclusionExclusionIn3d) {
  const std::vector<Box> shapes{Box::cube({0, 0, 0}, 0.5), Box::cube({0.25, 0.25, 0.25}, 0.5)};
  // 2 * 0.125 - 0.25^3
  EXPECT_NEAR(covlab::vacancy_measure_boxes(shapes, Box::uniform(3, 0, 1)), 1.0 - (0.25 - 0.015625), 1e-12);
}

TEST(Fuzz, CoverageAgreesWithVacancyAndWitnessesAreValid) {
  auto rng = covlab::split_stream(2718, 0);
  int covered = 0;
  for (int trial = 0; trial < 1000; ++trial) {
    const std::size_t dim = 1 + static_cast<std::size_t>(trial % 3);
    const auto shapes = random_boxes(rng, dim, 3 + trial % 25, 1.0);
    const auto target = Box::uniform(dim, 0, 1);
    const auto v = covlab::union_covers_box(shapes, target);
    const double vac = covlab::vacancy_measure_boxes(shapes, target);
    ASSERT_NE(v.status, CoverageStatus::unknown_at_resolution);
    if (v.covered()) {
      ++covered;
      ASSERT_LE(vac, 1e-12);
    } else {
      ASSERT_GT(vac, 0.0);
      ASSERT_TRUE(v.witness.has_value());
      ASSERT_TRUE(target.contains(*v.witness));
      ASSERT_TRUE(outside_all(shapes, *v.witness));
    }
  }
  EXPECT_GT(covered, 0);
}

TEST(Fuzz, AddingAShapeIsMonotone) {
  auto rng = covlab::split_stream(2718, 1);
  for (int trial = 0; trial < 500; ++trial) {
    const std::size_t dim = 1 + static_cast<std::size_t>(trial % 3);
    auto shapes = random_boxes(rng, dim, 2 + trial % 20, 1.0);
    const auto target = Box::uniform(dim, 0, 1);
    const bool before = covlab::union_covers_box(shapes, target).covered();
    const double vac_before = covlab::vacancy_measure_boxes(shapes, target);
    const auto extra = random_boxes(rng, dim, 1, 1.0);
    shapes.push_back(extra.front());
    const bool after = covlab::union_covers_box(shapes, target).covered();
    const double vac_after = covlab::vacancy_measure_boxes(shapes, target);
    ASSERT_TRUE(!before || after);
    ASSERT_LE(vac_after, vac_before + 1e-12);
  }
}

TEST(Balls, ContainingBallCovers) {
  const std::vector<Ball> balls{Ball(Point{0.0, 0.0}, 10.0)};
  EXPECT_EQ(covlab::union_covers_box_balls(balls, Box::uniform(2, -1, 1)).status, CoverageStatus::covered);
}

TEST(Balls, NoShapesIsNotCovered) {
  const auto v = covlab::union_covers_box_balls({}, Box::uniform(2, -1, 1));
  EXPECT_EQ(v.status, CoverageStatus::not_covered);
  ASSERT_TRUE(v.witness.has_value());
}

TEST(Balls, GapBetweenTwoBalls) {
  const std::vector<Ball> balls{Ball(Point{0.0, 0.0}, 1.0), Ball(Point{3.0, 0.0}, 1.0)};
  const auto v = covlab::union_covers_box_balls(balls, box2(0, 3, -0.1, 0.1));
  ASSERT_EQ(v.status, CoverageStatus::not_covered);
  EXPECT_NEAR((*v.witness)[0], 1.5, 0.5);
  for (const auto& b : balls) EXPECT_FALSE(b.contains(*v.witness));
}

TEST(Balls, OverlapCoverageIsCertified) {
  // two discs whose union contains the square; no single disc does
  const std::vector<Ball> balls{Ball(Point{0.0, 0.5}, 0.8), Ball(Point{1.0, 0.5}, 0.8)};
  const auto v = covlab::union_covers_box_balls(balls, Box::uniform(2, 0, 1));
  EXPECT_EQ(v.status, CoverageStatus::covered);
}

TEST(Balls, FuzzedWitnessesAreOutsideEveryBall) {
  auto rng = covlab::split_stream(999, 0);
  int counts[3] = {0, 0, 0};
  for (int trial = 0; trial < 1000; ++trial) {
    std::vector<Ball> balls;
    const int n = 1 + trial % 30;
    for (int k = 0; k < n; ++k)
      balls.emplace_back(Point{rng.uniform(-0.3, 1.3), rng.uniform(-0.3, 1.3)}, rng.uniform(0.05, 0.5));
    const auto target = Box::uniform(2, 0, 1);
    const auto v = covlab::union_covers_box_balls(balls, target, 8);
    ++counts[static_cast<int>(v.status)];
    if (v.status == CoverageStatus::not_covered) {
      ASSERT_TRUE(target.contains(*v.witness));
      for (const auto& b : balls) ASSERT_FALSE(b.contains(*v.witness));
    }
    if (v.status == CoverageStatus::covered) {
      // spot-check the certificate with random probes
      for (int p = 0; p < 200; ++p) {
        const Point q{rng.uniform(0, 1), rng.uniform(0, 1)};
        bool in = false;
        for (const auto& b : balls) in = in || b.contains(q);
        ASSERT_TRUE(in);
      }
    }
  }
  EXPECT_GT(counts[static_cast<int>(CoverageStatus::not_covered)], 0);
  EXPECT_GT(counts[static_cast<int>(CoverageStatus::covered)], 0);
}

TEST(Gaps, FrozenValues) {
  const std::vector<Interval> wide{{0, 2}};
  EXPECT_TRUE(covlab::uncovered_interval_gaps(wide, {0, 1}).empty());
  const std::vector<Interval> split{{0, 0.4}, {0.6, 1}};
  const auto g = covlab::uncovered_interval_gaps(split, {0, 1});
  ASSERT_EQ(g.size(), 1U);
  EXPECT_DOUBLE_EQ(g[0].lo, 0.4);
  EXPECT_DOUBLE_EQ(g[0].hi, 0.6);
  const std::vector<Interval> touching{{0, 0.5}, {0.5, 1}};
  EXPECT_TRUE(covlab::uncovered_interval_gaps(touching, {0, 1}).empty());
}

TEST(Gaps, AgreesWithBoxVacancyIn1d) {
  auto rng = covlab::split_stream(55, 0);
  for (int trial = 0; trial < 500; ++trial) {
    std::vector<Interval> ivs;
    std::vector<Box> boxes;
    for (int k = 0; k < 1 + trial % 15; ++k) {
      const double lo = rng.uniform(-0.2, 1.0);
      const double len = rng.uniform(0.01, 0.3);
      ivs.push_back({lo, lo + len});
      boxes.push_back(Box::cube(Point{lo}, len));
    }
    double total = 0.0;
    double prev = 0.0;
    for (const auto& g : covlab::uncovered_interval_gaps(ivs, {0, 1})) {
      ASSERT_GE(g.lo, prev);
      ASSERT_LT(g.lo, g.hi);
      total += g.length();
      prev = g.hi;
    }
    ASSERT_NEAR(total, covlab::vacancy_measure_boxes(boxes, Box::uniform(1, 0, 1)), 1e-12);
  }
}

TEST(Validation, RejectsBadShapes) {
  EXPECT_THROW(Box(Point{0.0}, Point{0.0}), covlab::ValidationError);
  EXPECT_THROW(Ball(Point{0.0}, -1.0), covlab::ValidationError);
  EXPECT_THROW(Point(5), covlab::ValidationError);
  EXPECT_THROW(covlab::uncovered_interval_gaps({}, {1, 0}), covlab::ValidationError);
}
