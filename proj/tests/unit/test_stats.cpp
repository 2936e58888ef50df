#include <gtest/gtest.h>

#include <algorithm>

#include "robustrl/errors.hpp"
#include "robustrl/stats.hpp"
#include "test_support.hpp"

namespace rt = robustrl::testing;

TEST(Iqm, SmallExamples) {
  const std::vector<double> four = {4.0, 1.0, 3.0, 2.0};
  EXPECT_DOUBLE_EQ(robustrl::iqm(four), 2.5);
  const std::vector<double> eight = {8, 1, 7, 2, 6, 3, 5, 4};
  EXPECT_DOUBLE_EQ(robustrl::iqm(eight), 4.5);
  // n = 5 drops one value from each end
  const std::vector<double> five = {100, 1, 2, 3, -100};
  EXPECT_DOUBLE_EQ(robustrl::iqm(five), 2.0);
}

TEST(Iqm, ConstantInputIsExact) {
  const std::vector<double> v(13, 0.1);
  EXPECT_EQ(robustrl::iqm(v), 0.1);
}

TEST(Iqm, MatchesTrimmedMeanOracle) {
  robustrl::Rng rng(1);
  for (int trial = 0; trial < 50; ++trial) {
    auto v = rt::random_values(40, rng, -10.0, 10.0);
    std::vector<double> sorted = v;
    std::sort(sorted.begin(), sorted.end());
    double acc = 0.0;
    for (int i = 10; i < 30; ++i) acc += sorted[i];
    EXPECT_NEAR(robustrl::iqm(v), acc / 20.0, 1e-12);
  }
}

TEST(Iqm, RejectsFewerThanFourSamples) {
  const std::vector<double> three = {1, 2, 3};
  EXPECT_THROW(robustrl::iqm(three), robustrl::ContractError);
}

TEST(Bootstrap, ConstantInputHasZeroWidth) {
  robustrl::Rng rng(2);
  const std::vector<double> v(20, -7.25);
  const auto ci = robustrl::bootstrap_ci(v, 500, 0.95, rng);
  EXPECT_EQ(ci.lower, -7.25);
  EXPECT_EQ(ci.upper, -7.25);
}

TEST(Bootstrap, DeterministicForFixedSeedAndOrdered) {
  robustrl::Rng seed_rng(3);
  const auto v = rt::random_values(20, seed_rng, 0.0, 1.0);
  robustrl::Rng a(99), b(99);
  const auto ca = robustrl::bootstrap_ci(v, 1000, 0.95, a);
  const auto cb = robustrl::bootstrap_ci(v, 1000, 0.95, b);
  EXPECT_EQ(ca.lower, cb.lower);
  EXPECT_EQ(ca.upper, cb.upper);
  EXPECT_LE(ca.lower, ca.upper);
  EXPECT_GE(ca.lower, *std::min_element(v.begin(), v.end()));
  EXPECT_LE(ca.upper, *std::max_element(v.begin(), v.end()));
}

TEST(Bootstrap, WiderLevelGivesWiderInterval) {
  robustrl::Rng seed_rng(4);
  const auto v = rt::random_values(30, seed_rng, 0.0, 1.0);
  robustrl::Rng a(5), b(5);
  const auto narrow = robustrl::bootstrap_ci(v, 2000, 0.5, a);
  const auto wide = robustrl::bootstrap_ci(v, 2000, 0.99, b);
  EXPECT_LE(wide.lower, narrow.lower);
  EXPECT_GE(wide.upper, narrow.upper);
}

TEST(Bootstrap, CoversTheIqmOfAWellSpreadSample) {
  robustrl::Rng seed_rng(6);
  const auto v = rt::random_values(40, seed_rng, 0.0, 1.0);
  robustrl::Rng rng(7);
  const auto ci = robustrl::bootstrap_ci(v, 2000, 0.95, rng);
  const double m = robustrl::iqm(v);
  EXPECT_LE(ci.lower, m);
  EXPECT_GE(ci.upper, m);
}

TEST(Bootstrap, RejectsBadArguments) {
  robustrl::Rng rng(8);
  const std::vector<double> three = {1, 2, 3};
  const std::vector<double> four = {1, 2, 3, 4};
  EXPECT_THROW(robustrl::bootstrap_ci(three, 100, 0.95, rng), robustrl::ContractError);
  EXPECT_THROW(robustrl::bootstrap_ci(four, 0, 0.95, rng), robustrl::ContractError);
  EXPECT_THROW(robustrl::bootstrap_ci(four, 100, 1.0, rng), robustrl::ContractError);
}
