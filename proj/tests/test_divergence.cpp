#include <gtest/gtest.h>

#include <cmath>
#include <vector>

#include "covlab/divergence.hpp"

using covlab::SeriesStatus;

namespace {

std::vector<double> power_terms(double c, int count) {
  std::vector<double> t;
  for (int m = 1; m <= count; ++m) t.push_back(std::pow(m, -c));
  return t;
}

}  // namespace

TEST(Gauss, SyntheticExponents) {
  EXPECT_EQ(covlab::diagnose_series(power_terms(0.5, 4001), 1, 1000, 4000).status, SeriesStatus::diverges);
  EXPECT_EQ(covlab::diagnose_series(power_terms(2.0, 4001), 1, 1000, 4000).status, SeriesStatus::converges);
  EXPECT_EQ(covlab::diagnose_series(power_terms(1.0, 4001), 1, 1000, 4000).status, SeriesStatus::indeterminate);
}

TEST(Gauss, FittedExponentIsAccurate) {
  for (double c : {0.3, 0.5, 1.0, 1.5, 2.0, 3.0}) {
    const auto v = covlab::diagnose_series(power_terms(c, 4001), 1, 1000, 4000);
    EXPECT_NEAR(v.exponent, c, 0.01) << c;
  }
}

TEST(Gauss, LogTermsMatchPlainTerms) {
  const auto t = power_terms(1.7, 500);
  std::vector<double> logs;
  for (double x : t) logs.push_back(std::log(x));
  const auto a = covlab::diagnose_series(t, 1, 100, 400);
  const auto b = covlab::diagnose_log_series(logs, 1, 100, 400);
  EXPECT_NEAR(a.exponent, b.exponent, 1e-12);
  EXPECT_EQ(a.status, b.status);
}

TEST(Gauss, BandEdges) {
  EXPECT_EQ(covlab::classify_gauss_exponent(0.9), SeriesStatus::diverges);
  EXPECT_EQ(covlab::classify_gauss_exponent(0.95), SeriesStatus::indeterminate);
  EXPECT_EQ(covlab::classify_gauss_exponent(1.05), SeriesStatus::indeterminate);
  EXPECT_EQ(covlab::classify_gauss_exponent(1.1), SeriesStatus::converges);
}

TEST(Gauss, AllZeroTermsConverge) {
  const std::vector<double> zeros(100, 0.0);
  const auto v = covlab::diagnose_series(zeros, 1, 10, 50);
  EXPECT_EQ(v.status, SeriesStatus::converges);
}

TEST(Gauss, RangeOutsideTermsThrows) {
  const auto t = power_terms(2.0, 100);
  EXPECT_THROW(covlab::diagnose_series(t, 1, 10, 100), covlab::ValidationError);
  EXPECT_THROW(covlab::diagnose_series(t, 1, 50, 10), covlab::ValidationError);
}

TEST(Trace, PowersOfTwoAndLast) {
  const std::vector<double> ones(10, 1.0);
  const auto trace = covlab::partial_sum_trace(ones, 1);
  std::vector<std::int64_t> idx;
  for (const auto& p : trace) {
    idx.push_back(p.index);
    EXPECT_DOUBLE_EQ(p.partial_sum, static_cast<double>(p.index));
  }
  EXPECT_EQ(idx, (std::vector<std::int64_t>{1, 2, 4, 8, 10}));
}
