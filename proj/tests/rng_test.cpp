#include <gtest/gtest.h>

#include <set>

#include "cliffsim/rng.hpp"

using namespace cliffsim::rng;

TEST(Rng, Fnv1aKnownVectors) {
  EXPECT_EQ(fnv1a(""), 0xcbf29ce484222325ULL);
  EXPECT_EQ(fnv1a("a"), 0xaf63dc4c8601ec8cULL);
  EXPECT_EQ(fnv1a("foobar"), 0x85944171f73967e8ULL);
}

TEST(Rng, SplitMixReferenceSequence) {
  // First two outputs of the reference splitmix64 generator seeded with 0.
  EXPECT_EQ(mix64(0), 0xe220a8397b1dcdafULL);
  EXPECT_EQ(mix64(0x9e3779b97f4a7c15ULL), 0x6e789e6aa1b965f4ULL);
}

TEST(Rng, DrawsArePureFunctionsOfCounters) {
  Stream a(7, "x"), b(7, "x");
  const double late = a.uniform(std::uint64_t{1000}, 3, 4);
  for (int i = 0; i < 50; ++i) a.uniform(static_cast<std::uint64_t>(i));
  EXPECT_EQ(a.uniform(std::uint64_t{1000}, 3, 4), late);
  EXPECT_EQ(b.uniform(std::uint64_t{1000}, 3, 4), late);
}

TEST(Rng, StreamsAndSeedsAreDistinct) {
  Stream a(1, "alpha"), b(1, "beta"), c(2, "alpha");
  EXPECT_NE(a.bits(0), b.bits(0));
  EXPECT_NE(a.bits(0), c.bits(0));
  EXPECT_NE(a.bits(0, 1), a.bits(1, 0));
  std::set<std::uint64_t> seeds;
  for (std::uint64_t i = 0; i < 1000; ++i) seeds.insert(derive_seed(5, i, i % 7));
  EXPECT_EQ(seeds.size(), 1000u);
}

TEST(Rng, UniformMomentsAndRange) {
  Stream s(42, "moments");
  const int n = 200000;
  double sum = 0.0, sq = 0.0;
  for (int i = 0; i < n; ++i) {
    const double u = s.uniform(static_cast<std::uint64_t>(i));
    ASSERT_GE(u, 0.0);
    ASSERT_LT(u, 1.0);
    sum += u;
    sq += u * u;
  }
  const double mean = sum / n, var = sq / n - mean * mean;
  // Standard error of the mean is sqrt(1/12/n) ~ 6.5e-4.
  EXPECT_NEAR(mean, 0.5, 4e-3);
  EXPECT_NEAR(var, 1.0 / 12.0, 2e-3);
  const double v = s.uniform(1.0, 2.0, 9);
  EXPECT_GE(v, 1.0);
  EXPECT_LT(v, 2.0);
}
