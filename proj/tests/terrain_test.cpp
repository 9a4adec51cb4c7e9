#include <gtest/gtest.h>

#include <cmath>
#include <cstring>

#include "cliffsim/terrain.hpp"

using namespace cliffsim;
using namespace cliffsim::terrain;

namespace {

// Direct polar-form evaluation of the two-dimensional W-M sum, written out
// independently of WmSurface apart from the phase table.
double reference_height(const WmSurface& s, double x, double y) {
  const auto& p = s.params();
  const double C = p.sampleLength * std::pow(p.roughnessAmp / p.sampleLength, p.fractalDim - 2.0) *
                   std::sqrt(std::log(p.gammaFreq) / p.ridgeCount);
  const double r = std::hypot(x, y), theta = std::atan2(y, x);
  double z = 0.0;
  for (int m = 1; m <= p.ridgeCount; ++m)
    for (int n = 0; n <= p.maxFreqIndex; ++n) {
      const double phi = s.phase(m - 1, n);
      z += std::pow(p.gammaFreq, (p.fractalDim - 3.0) * n) *
           (std::cos(phi) - std::cos(2 * kPi * std::pow(p.gammaFreq, n) * r / p.sampleLength *
                                         std::cos(theta - kPi * m / p.ridgeCount) + phi));
    }
  return C * z;
}

TerrainPatch paraboloid(double R, double spacing, int half) {
  TerrainPatch p;
  p.spacing = spacing;
  p.rows = p.cols = static_cast<std::size_t>(2 * half + 1);
  p.originX = p.originY = -half * spacing;
  for (std::size_t i = 0; i < p.rows; ++i)
    for (std::size_t j = 0; j < p.cols; ++j) {
      const double x = p.x(j), y = p.y(i);
      p.heights.push_back(5e-6 - (x * x + y * y) / (2 * R));
    }
  return p;
}

}  // namespace

TEST(Terrain, ValidateRejectsBadParams) {
  TerrainParams p;
  p.fractalDim = 2.0;
  EXPECT_THROW(validate(p), DomainError);
  p = {};
  p.fractalDim = 3.0;
  EXPECT_THROW(validate(p), DomainError);
  p = {};
  p.gammaFreq = 1.0;
  EXPECT_THROW(validate(p), DomainError);
  p = {};
  p.roughnessAmp = -1.0;
  EXPECT_THROW(wm_height(p, 0, 0), DomainError);
  EXPECT_THROW(generate_patch({}, 1e-3, 0.0), DomainError);
  EXPECT_THROW(generate_patch({}, 1e-5, 1e-5), DomainError);
}

TEST(Terrain, MatchesPolarFormReference) {
  TerrainParams p;
  p.phaseSeed = 77;
  const WmSurface s(p);
  for (double x : {-3e-4, 0.0, 1.1e-3})
    for (double y : {-7e-4, 2e-4, 1.9e-3}) {
      const double ref = reference_height(s, x, y);
      EXPECT_NEAR(s.height(x, y), ref, 1e-12 + 1e-9 * std::abs(ref));
    }
  EXPECT_EQ(wm_height(p, 0.1, 0.2), wm_height(p, 0.1, 0.2));
}

TEST(Terrain, AmplitudeConstantClosedForm) {
  TerrainParams p;
  p.roughnessAmp = 4e-6;
  p.fractalDim = 2.3;
  // L (G/L)^(D-2) sqrt(ln gamma / M), evaluated by hand for these numbers.
  const double expected = 2e-3 * std::pow(2e-3, 0.3) * std::sqrt(std::log(1.5) / 10.0);
  EXPECT_NEAR(amplitude_constant(p), expected, 1e-15);
}

TEST(Terrain, ZeroAmplitudeIsExactlyFlat) {
  TerrainParams p;
  p.roughnessAmp = 0.0;
  const auto patch = generate_patch(p, 1e-3, 1e-5);
  for (double z : patch.heights) ASSERT_EQ(z, 0.0);
  EXPECT_EQ(patch.rms(), 0.0);
  EXPECT_TRUE(extract_asperities(patch).empty());
}

TEST(Terrain, LatticeCounting) {
  const auto patch = generate_patch({}, 1e-3, 1e-5);
  EXPECT_EQ(patch.rows, 101u);
  EXPECT_EQ(patch.cols, 101u);
  EXPECT_NO_THROW(patch.check());
  EXPECT_EQ(nyquist_max_freq_index(2e-3, 20e-6, 1.5), 11);
}

TEST(Terrain, SeedDeterminismIsBitIdentical) {
  TerrainParams p;
  p.phaseSeed = 9;
  const auto a = generate_patch(p, 1e-3, 2e-5), b = generate_patch(p, 1e-3, 2e-5);
  ASSERT_EQ(a.heights.size(), b.heights.size());
  EXPECT_EQ(std::memcmp(a.heights.data(), b.heights.data(), a.heights.size() * sizeof(double)), 0);
  p.phaseSeed = 10;
  const auto c = generate_patch(p, 1e-3, 2e-5);
  EXPECT_NE(a.heights, c.heights);
  const auto asp1 = extract_asperities(a), asp2 = extract_asperities(b);
  ASSERT_EQ(asp1.size(), asp2.size());
  for (std::size_t i = 0; i < asp1.size(); ++i) EXPECT_EQ(asp1[i].tipRadius, asp2[i].tipRadius);
}

TEST(Terrain, RmsScalesWithAmplitudeConstant) {
  TerrainParams p;
  const double spacing = 2e-3 / 255.0;
  const auto a = generate_patch(p, 2e-3, spacing);
  p.roughnessAmp *= 2.0;
  const auto b = generate_patch(p, 2e-3, spacing);
  ASSERT_EQ(a.rows, 256u);
  EXPECT_NEAR(b.rms() / a.rms(), std::pow(2.0, p.fractalDim - 2.0), 0.01 * std::sqrt(2.0));
  EXPECT_NEAR(b.rms() / amplitude_constant(p), a.rms() / amplitude_constant({}), 1e-9);
}

TEST(Terrain, ParaboloidBumpRadius) {
  for (double R : {20e-6, 50e-6, 200e-6}) {
    const auto patch = paraboloid(R, 1e-6, 6);
    const auto asp = extract_asperities(patch);
    ASSERT_EQ(asp.size(), 1u);
    EXPECT_NEAR(asp[0].tipRadius, R, 0.05 * R);
    EXPECT_NEAR(asp[0].position.x(), 0.0, 1e-15);
    // Spherical cap with sag s^2 / 2R one step up the wall.
    EXPECT_NEAR(asp[0].normalAngle, std::acos(1.0 - 1e-12 / (2 * R * R)), 1e-6);
  }
}

TEST(Terrain, AsperitiesAreLocalMaxima) {
  const auto patch = generate_patch({}, 2e-3, 20e-6);
  const auto asp = extract_asperities(patch);
  ASSERT_FALSE(asp.empty());
  double meanR = 0.0;
  for (const auto& a : asp) {
    const auto j = static_cast<std::size_t>(std::llround((a.position.x() - patch.originX) / patch.spacing));
    const auto i = static_cast<std::size_t>(std::llround((a.position.y() - patch.originY) / patch.spacing));
    for (int di = -1; di <= 1; ++di) {
      for (int dj = -1; dj <= 1; ++dj) {
        if (di || dj) {
          ASSERT_LT(patch.at(i + di, j + dj), patch.at(i, j));
        }
      }
    }
    EXPECT_GT(a.tipRadius, 0.0);
    EXPECT_TRUE(std::isfinite(a.tipRadius));
    EXPECT_GE(a.normalAngle, 0.0);
    EXPECT_LE(a.normalAngle, kPi);
    meanR += a.tipRadius;
  }
  meanR /= static_cast<double>(asp.size());
  // Micrometre regime: between a tenth and a hundred lattice steps.
  EXPECT_GT(meanR, 2e-6);
  EXPECT_LT(meanR, 2e-3);
}
