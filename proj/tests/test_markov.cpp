#include <gtest/gtest.h>

#include <cmath>
#include <vector>

#include "covlab/lattice.hpp"
#include "covlab/markov.hpp"

using covlab::InitialState;
using covlab::MarkovCoverageSpec;
using covlab::RadiusDistribution;

namespace {

MarkovCoverageSpec worked() { return {0.4, 0.6, 0.3, 0.7, RadiusDistribution::degenerate(1.0), InitialState::stationary}; }

std::vector<MarkovCoverageSpec> fuzzed_specs(int count, std::uint64_t seed) {
  auto rng = covlab::split_stream(seed, 0);
  const std::vector<RadiusDistribution> laws{
      RadiusDistribution::degenerate(1.0), RadiusDistribution::degenerate(2.0), RadiusDistribution::discrete_pareto(2.0),
      RadiusDistribution::discrete_pareto(0.7), RadiusDistribution::table({{1, 0.5}, {3, 0.3}, {6, 0.2}})};
  const InitialState inits[3] = {InitialState::stationary, InitialState::start_at_0, InitialState::start_at_1};
  std::vector<MarkovCoverageSpec> out;
  for (int i = 0; i < count; ++i) {
    const double p01 = rng.uniform(0.02, 0.98);
    const double p10 = rng.uniform(0.02, 0.98);
    out.push_back(MarkovCoverageSpec::from_exits(p01, p10, laws[static_cast<std::size_t>(i) % laws.size()],
                                                 inits[i % 3]));
  }
  return out;
}

}  // namespace

TEST(Recurrence, HandValues) {
  const auto t = covlab::recurrence_table(worked(), 3);
  EXPECT_EQ(t.at(1).p0, 1.0);
  EXPECT_EQ(t.at(1).p1, 0.0);
  EXPECT_NEAR(t.at(2).p0, 0.4, 1e-15);
  EXPECT_EQ(t.at(2).p1, 0.0);
  EXPECT_NEAR(t.at(3).p0, 0.16, 1e-15);
  EXPECT_NEAR(t.at(3).p1, 0.12, 1e-15);
}

TEST(Recurrence, SingleRow) {
  const auto t = covlab::recurrence_table(worked(), 1);
  ASSERT_EQ(t.rows.size(), 1U);
  EXPECT_EQ(t.rows[0].p0, 1.0);
  EXPECT_EQ(t.rows[0].p1, 0.0);
}

TEST(Recurrence, InfiniteReachIsGeometric) {
  auto s = worked();
  s.rho = RadiusDistribution::degenerate(1e9);
  s.validate();
  const auto t = covlab::recurrence_table(s, 30);
  for (std::int64_t k = 1; k <= 30; ++k) {
    EXPECT_EQ(t.at(k).p1, 0.0);
    EXPECT_NEAR(t.at(k).p0, std::pow(0.4, static_cast<double>(k - 1)), 1e-15);
  }
}

TEST(Recurrence, EntriesAreProbabilities) {
  for (const auto& s : fuzzed_specs(30, 3)) {
    for (const auto& r : covlab::recurrence_table(s, 50).rows) {
      ASSERT_GE(r.p0, 0.0);
      ASSERT_LE(r.p0, 1.0);
      ASSERT_GE(r.p1, 0.0);
      ASSERT_LE(r.p1, 1.0);
      ASSERT_GE(r.p, 0.0);
      ASSERT_LE(r.p, 1.0);
    }
  }
}

TEST(BruteForce, HandValues) {
  auto s = worked();
  s.initial = InitialState::start_at_0;
  EXPECT_NEAR(covlab::brute_force_uncovered(s, 3), 0.16, 1e-15);
  s.initial = InitialState::start_at_1;
  EXPECT_NEAR(covlab::brute_force_uncovered(s, 3), 0.12, 1e-15);
  EXPECT_EQ(covlab::brute_force_uncovered(s, 1), 0.0);
}

TEST(BruteForce, MatchesRecurrenceKeystone) {
  for (const auto& s : fuzzed_specs(50, 11)) {
    const auto t = covlab::recurrence_table(s, 12);
    for (std::int64_t k = 1; k <= 12; ++k)
      ASSERT_NEAR(covlab::brute_force_uncovered(s, k), t.at(k).p, 1e-12) << "k=" << k;
  }
}

TEST(BruteForce, AlternatingChainCoversEverySite) {
  const double eps = 1e-9;
  const MarkovCoverageSpec s{eps, 1.0 - eps, 1.0 - eps, eps, RadiusDistribution::degenerate(1.0), InitialState::stationary};
  for (std::int64_t k = 2; k <= 12; ++k) EXPECT_LT(covlab::brute_force_uncovered(s, k), 1e-8);
}

TEST(BruteForce, RejectsLargeK) {
  EXPECT_THROW(covlab::brute_force_uncovered(worked(), 15), covlab::ValidationError);
}

TEST(Validation, Invariants) {
  EXPECT_NO_THROW(worked().validate());
  auto s = worked();
  s.p00 = 0.0;
  s.p01 = 1.0;
  EXPECT_THROW(s.validate(), covlab::ValidationError);
  s = worked();
  s.p01 = 0.5;
  EXPECT_THROW(s.validate(), covlab::ValidationError);
  s = worked();
  s.rho = RadiusDistribution::pareto_tail(2.0);
  EXPECT_THROW(s.validate(), covlab::ValidationError);
  // p01 = 0 forces p00 = 1, outside (0, 1)
  EXPECT_THROW(MarkovCoverageSpec::from_exits(0.0, 0.3, RadiusDistribution::degenerate(1.0)).validate(),
               covlab::ValidationError);
}

TEST(Stationary, OpenFraction) {
  EXPECT_NEAR(covlab::stationary_open_fraction(worked()), 2.0 / 3.0, 1e-15);
  EXPECT_DOUBLE_EQ(MarkovCoverageSpec::from_exits(0.4, 0.4, RadiusDistribution::degenerate(1.0)).stationary_open_fraction(), 0.5);
  EXPECT_LT(MarkovCoverageSpec::from_exits(1e-9, 0.3, RadiusDistribution::degenerate(1.0)).stationary_open_fraction(), 1e-8);
}

TEST(Renewal, DelayedProductHoldsOnEnumeratedGrid) {
  for (const auto& s0 : fuzzed_specs(20, 5)) {
    auto s = s0;
    s.initial = InitialState::stationary;
    std::vector<std::pair<std::int64_t, std::int64_t>> pairs;
    for (std::int64_t i = 1; i <= 10; ++i)
      for (std::int64_t k = i; k <= 10; ++k) pairs.emplace_back(i, k);
    ASSERT_LE(covlab::markov_renewal_check(s, pairs), 1e-10);
  }
}

TEST(Renewal, StationaryGapFormNeedsIndependentSites) {
  // with p01 = p11 the chain is i.i.d. and P(A_k and A_i) = P(A_{k-i+1}) P(A_i) under the stationary law
  auto s = MarkovCoverageSpec::from_exits(0.35, 0.65, RadiusDistribution::discrete_pareto(1.5));
  const auto t = covlab::recurrence_table(s, 12);
  for (std::int64_t i = 1; i <= 5; ++i) {
    for (std::int64_t k = i + 1; k <= 10; ++k) {
      const std::int64_t both[2] = {i, k};
      EXPECT_NEAR(covlab::brute_force_joint_uncovered(s, both), t.at(i).p * t.at(k - i + 1).p0, 1e-12);
    }
  }
}

TEST(Reduction, IndependentChainMatchesLineLattice) {
  const double p = 0.35;
  for (const auto& rho : {RadiusDistribution::degenerate(2.0), RadiusDistribution::discrete_pareto(1.5),
                          RadiusDistribution::table({{1, 0.5}, {4, 0.5}})}) {
    const auto s = MarkovCoverageSpec::from_exits(p, 1.0 - p, rho);
    const covlab::LatticeSpec lat{1, p, rho};
    const auto t = covlab::recurrence_table(s, 40);
    for (std::int64_t k = 1; k <= 40; ++k)
      ASSERT_NEAR(t.at(k).p, std::exp(covlab::log_uncovered_prob(lat, k, 1)), 1e-14) << rho.to_string() << " k=" << k;
  }
}

TEST(Threshold, DiscreteParetoExamples) {
  const auto rho = RadiusDistribution::discrete_pareto(2.0);
  const auto covers = covlab::threshold_classify(MarkovCoverageSpec::from_exits(0.6, 0.3, rho));
  EXPECT_EQ(covers.status, covlab::CoverageClass::covers_almost_surely);
  EXPECT_EQ(covers.liminf, covlab::Extended(2.0));
  EXPECT_DOUBLE_EQ(covers.inv_liminf.value(), 0.5);
  const auto fails = covlab::threshold_classify(MarkovCoverageSpec::from_exits(0.2, 0.3, rho));
  EXPECT_NEAR(fails.open_fraction, 0.4, 1e-15);
  EXPECT_EQ(fails.status, covlab::CoverageClass::does_not_cover_almost_surely);
}

TEST(Threshold, FiniteSupportNeverCovers) {
  const auto v = covlab::threshold_classify(
      MarkovCoverageSpec::from_exits(0.9, 0.05, RadiusDistribution::table({{1, 0.5}, {7, 0.5}})));
  EXPECT_TRUE(v.inv_limsup.is_infinite());
  EXPECT_EQ(v.status, covlab::CoverageClass::does_not_cover_almost_surely);
}

TEST(Threshold, SmallTailFails) {
  // l = L = 0.8: 1/L = 1.25 exceeds any open fraction
  const auto v = covlab::threshold_classify(
      MarkovCoverageSpec::from_exits(0.9, 0.1, RadiusDistribution::discrete_pareto(0.8)));
  EXPECT_NEAR(v.open_fraction, 0.9, 1e-15);
  EXPECT_EQ(v.status, covlab::CoverageClass::does_not_cover_almost_surely);
}

TEST(Threshold, BoundaryIsIndeterminate) {
  // pi1 exactly 1/l = 1/L
  const auto edge =
      covlab::threshold_classify(MarkovCoverageSpec::from_exits(0.3, 0.3, RadiusDistribution::discrete_pareto(2.0)));
  EXPECT_EQ(edge.status, covlab::CoverageClass::indeterminate);
}

TEST(GeneratingFunction, GeometricClosedForm) {
  auto s = worked();
  s.rho = RadiusDistribution::degenerate(1e9);
  const auto g = covlab::generating_function_partial(s, 0.5, 1, 60);
  // sum_{k>=1} 0.4^{k-1} 0.5^k = 0.5 / (1 - 0.2)
  EXPECT_NEAR(g.psi0, 0.625, 1e-14);
  EXPECT_EQ(g.psi1, 0.0);
}

TEST(GeneratingFunction, SingleTermAndMonotone) {
  const auto s = worked();
  const auto t = covlab::recurrence_table(s, 5);
  const auto one = covlab::generating_function_partial(s, 0.7, 5, 5);
  EXPECT_NEAR(one.psi0, t.at(5).p0 * std::pow(0.7, 5), 1e-15);
  EXPECT_NEAR(one.psi1, t.at(5).p1 * std::pow(0.7, 5), 1e-15);
  double prev0 = 0.0;
  double prev1 = 0.0;
  for (std::int64_t K = 2; K <= 40; ++K) {
    const auto g = covlab::generating_function_partial(s, 0.9, 2, K);
    EXPECT_GE(g.psi0, prev0);
    EXPECT_GE(g.psi1, prev1);
    prev0 = g.psi0;
    prev1 = g.psi1;
  }
}

TEST(PartialFractions, SignOfEMatchesThresholdOnGrid) {
  int mismatches = 0;
  int checked = 0;
  for (int a = 1; a <= 10; ++a) {
    for (int b = 1; b <= 10; ++b) {
      const double p01 = 0.095 * a;
      const double p10 = 0.095 * b;
      const auto s = MarkovCoverageSpec::from_exits(p01, p10, RadiusDistribution::degenerate(1.0));
      for (double C : {0.5, 1.0, 1.5, 2.0, 3.0}) {
        const double E = covlab::partial_fraction_E(s, C);
        if (std::fabs(E) <= 1e-12) continue;
        ++checked;
        const double rhs = 1.0 / C - s.stationary_open_fraction();
        if ((E > 0) != (rhs > 0)) ++mismatches;
      }
    }
  }
  EXPECT_EQ(mismatches, 0);
  EXPECT_GT(checked, 450);
}

TEST(PartialFractions, BoundaryGivesZero) {
  // pi1 = 2/3 and C = 1.5
  const auto s = MarkovCoverageSpec::from_exits(0.6, 0.3, RadiusDistribution::degenerate(1.0));
  EXPECT_NEAR(covlab::partial_fraction_E(s, 1.5), 0.0, 1e-12);
}

TEST(PartialFractions, ReExpansionReproducesRatio) {
  for (const auto& s : fuzzed_specs(20, 9)) {
    for (double C : {0.5, 1.3, 2.0, 4.0}) {
      const auto pf = covlab::partial_fractions(s, C);
      for (int k = 0; k < 10; ++k) {
        const double x = -0.9 + 0.19 * k;
        const double direct = covlab::q_polynomial(s, C, x) / covlab::p_polynomial(s, x);
        ASSERT_NEAR(pf.evaluate(s, x), direct, 1e-10 * std::max(1.0, std::fabs(direct)));
      }
    }
  }
}

TEST(PartialFractions, ZeroMiddleRootIsHandled) {
  // p01 + p10 = 1 makes the third factor constant
  const auto s = MarkovCoverageSpec::from_exits(0.4, 0.6, RadiusDistribution::degenerate(1.0));
  const auto pf = covlab::partial_fractions(s, 1.7);
  for (double x : {-0.5, 0.1, 0.6}) {
    EXPECT_NEAR(pf.evaluate(s, x), covlab::q_polynomial(s, 1.7, x) / covlab::p_polynomial(s, x), 1e-12);
  }
}

TEST(K0Conditions, Checkable) {
  const auto s = MarkovCoverageSpec::from_exits(0.6, 0.3, RadiusDistribution::discrete_pareto(2.0));
  const auto c = covlab::check_k0_conditions(s, 2.5, 5, 200);
  EXPECT_TRUE(c.offset_positive);
  EXPECT_TRUE(c.p0_positive);
  EXPECT_TRUE(c.p1_positive);
  // F(k-1) = 1 - 2/(k-1) reaches 1 - 2.5/(k+1) only from k = 9
  EXPECT_FALSE(c.tail_bound_holds);
  EXPECT_TRUE(covlab::check_k0_conditions(s, 2.5, 9, 200).tail_bound_holds);
  // G(2) = 1 so an open site at distance 3 never misses: P1(A_4) = 0
  EXPECT_FALSE(covlab::check_k0_conditions(s, 2.5, 4, 200).p1_positive);
  const auto d = covlab::check_k0_conditions(s, 4.0, 6, 500);
  EXPECT_TRUE(d.tail_bound_holds);
  EXPECT_TRUE(d.all());
  EXPECT_GT(covlab::r_polynomial(s, 4.0, 6, 0.5), 0.0);
}

TEST(Simulate, FrequenciesMatchTable) {
  const auto s = MarkovCoverageSpec::from_exits(0.45, 0.55, RadiusDistribution::table({{1, 0.6}, {3, 0.4}}));
  const auto t = covlab::recurrence_table(s, 8);
  constexpr int kReps = 100000;
  std::vector<double> hits(11, 0.0);
  for (int r = 0; r < kReps; ++r) {
    auto rng = covlab::split_stream(321, static_cast<std::uint64_t>(r));
    for (const auto k : covlab::simulate_markov_coverage(s, 10, rng).uncovered) hits[static_cast<std::size_t>(k)] += 1.0;
  }
  for (std::int64_t k = 1; k <= 8; ++k) {
    const double p = t.at(k).p;
    EXPECT_LE(std::fabs(hits[static_cast<std::size_t>(k)] / kReps - p), 4.0 * std::sqrt(p * (1 - p) / kReps)) << k;
  }
}

TEST(Simulate, GuardBandAndLastIndex) {
  const auto s = MarkovCoverageSpec::from_exits(0.2, 0.3, RadiusDistribution::discrete_pareto(2.0));
  auto rng = covlab::split_stream(5, 5);
  const auto sim = covlab::simulate_markov_coverage(s, 1000, rng);
  EXPECT_EQ(sim.guard, 100);
  ASSERT_TRUE(sim.last_uncovered.has_value());
  EXPECT_LE(*sim.last_uncovered, 900);
  EXPECT_EQ(*sim.last_uncovered, sim.uncovered.back());
}
