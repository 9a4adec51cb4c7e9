#include <gtest/gtest.h>

#include <cmath>
#include <vector>

#include "cliffsim/grip.hpp"

using namespace cliffsim;
using namespace cliffsim::grip;

namespace {

SpineSpec spec(double loadDeg, double mu) {
  SpineSpec s;
  s.loadAngle = deg2rad(loadDeg);
  s.frictionCoeff = mu;
  return s;
}

Asperity asperity(double r, double angle) {
  Asperity a;
  a.tipRadius = r;
  a.normalAngle = angle;
  return a;
}

}  // namespace

TEST(Grip, ThetaMinEndpoints) {
  EXPECT_NEAR(rad2deg(theta_min(spec(5, 0.15))), 86.5, 0.1);
  EXPECT_NEAR(rad2deg(theta_min(spec(5, 0.25))), 81.0, 0.1);
  SpineSpec s = spec(5, 1.0);
  s.loadAngle = 0.0;
  EXPECT_DOUBLE_EQ(rad2deg(theta_min(s)), 45.0);
  EXPECT_THROW(theta_min(spec(5, 0.0)), DomainError);
}

TEST(Grip, ThetaMinMonotone) {
  EXPECT_GT(theta_min(spec(5, 0.15)), theta_min(spec(5, 0.2)));
  EXPECT_LT(theta_min(spec(3.5, 0.2)), theta_min(spec(8, 0.2)));
}

TEST(Grip, EffectiveRadius) {
  EXPECT_DOUBLE_EQ(effective_radius(10e-6, 10e-6), 5e-6);
  EXPECT_NEAR(effective_radius(12.5e-6, 25e-6), 8.333333e-6, 1e-12);
  EXPECT_LE(effective_radius(12e-6, 30e-6), 12e-6);
  EXPECT_THROW(effective_radius(0.0, 1e-6), DomainError);
}

TEST(Grip, MaxLoadIsQuadraticInRadius) {
  const SpineSpec s = spec(5, 0.2);
  SpineSpec s2 = s;
  s2.tipRadius *= 2;
  const double f1 = max_spine_load(s, asperity(20e-6, 1.5));
  const double f2 = max_spine_load(s2, asperity(40e-6, 1.5));
  EXPECT_NEAR(f2 / f1, 4.0, 1e-12);
  EXPECT_GT(max_spine_load(s, asperity(30e-6, 1.5)), f1);
  // kappa by hand: (pi 1.5e9 / 0.6)^3 / (2 (200e9)^2)
  const double kappa = std::pow(kPi * 1.5e9 / 0.6, 3) / (2 * 4e22);
  EXPECT_NEAR(load_constant(s) / kappa, 1.0, 1e-12);
  EXPECT_DOUBLE_EQ(max_spine_load(s, asperity(18.5e-6, 1.5), 2.0), 2.0 * std::pow(9.25e-6, 2));
  EXPECT_THROW(load_constant(spec(5, 0.5)), DomainError);
}

TEST(Grip, EngagementRules) {
  const SpineSpec s = spec(5, 0.2);
  const double tmin = theta_min(s);
  EXPECT_FALSE(can_engage(s, asperity(s.tipRadius / 2, kPi)));
  EXPECT_TRUE(can_engage(s, asperity(2 * s.tipRadius, tmin + deg2rad(1))));
  EXPECT_FALSE(can_engage(s, asperity(2 * s.tipRadius, tmin - deg2rad(1))));
  SpineSpec smaller = s;
  smaller.tipRadius *= 0.5;
  EXPECT_TRUE(can_engage(smaller, asperity(2 * s.tipRadius, tmin + deg2rad(1))));
}

TEST(Grip, EngagementFractionFallsWithTipRadius) {
  std::vector<Asperity> pop;
  for (int i = 0; i < 400; ++i) pop.push_back(asperity(5e-6 + 0.1e-6 * i, deg2rad(88)));
  const auto array = make_spine_array(14, 12e-6, 25e-6, spec(5, 0.2), 0.3);
  ASSERT_EQ(array.spines.size(), 14u);
  EXPECT_DOUBLE_EQ(array.spines.front().tipRadius, 12e-6);
  EXPECT_DOUBLE_EQ(array.spines.back().tipRadius, 25e-6);
  double prev = 2.0;
  for (const auto& sp : array.spines) {
    const double f = engagement_fraction(sp, pop);
    EXPECT_LT(f, prev);
    prev = f;
  }
}

TEST(Grip, SampleGripAggregates) {
  const auto array = make_spine_array(50, 12e-6, 25e-6, spec(5, 0.2), 0.3);
  EXPECT_EQ(sample_grip(array, {}, 1).engagedCount, 0);
  EXPECT_EQ(sample_grip(array, {}, 1).totalCapacity, 0.0);

  std::vector<Asperity> easy(10, asperity(1e-3, kPi / 2));
  CapacityBand fixed;
  fixed.fixed = 1.5;
  const auto g = sample_grip(array, easy, 3, fixed);
  EXPECT_EQ(g.engagedCount, 50);
  EXPECT_DOUBLE_EQ(g.totalCapacity, 1.5 * 50);

  const auto r = sample_grip(array, easy, 4);
  double sum = 0.0;
  for (double c : r.perContactCapacity) {
    EXPECT_GE(c, 1.0);
    EXPECT_LT(c, 2.0);
    sum += c;
  }
  EXPECT_EQ(sum, r.totalCapacity);
  EXPECT_EQ(r.engagedCount, static_cast<int>(r.perContactCapacity.size()));
}

TEST(Grip, MeanCapacityLawOfLargeNumbers) {
  const auto array = make_spine_array(20, 12e-6, 25e-6, spec(5, 0.2), 0.3);
  std::vector<Asperity> easy(4, asperity(1e-3, kPi / 2));
  double mean = 0.0;
  const int n = 10000;
  for (int i = 0; i < n; ++i) mean += sample_grip(array, easy, static_cast<std::uint64_t>(i)).totalCapacity;
  mean /= n;
  EXPECT_NEAR(mean, 1.5 * 20, 0.01 * 1.5 * 20);
}

TEST(Grip, PartialEngagementProbability) {
  // Half the asperities pass for every spine, so about half the spines engage.
  std::vector<Asperity> pop{asperity(1e-3, kPi / 2), asperity(1e-3, 0.1)};
  const auto array = make_spine_array(2000, 12e-6, 25e-6, spec(5, 0.2), 0.3);
  const auto g = sample_grip(array, pop, 11);
  EXPECT_NEAR(g.engagedCount / 2000.0, 0.5, 0.04);
}
