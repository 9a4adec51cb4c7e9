#pragma once

// Fractal rough-wall synthesis (multivariate Weierstrass-Mandelbrot sum)
// and extraction of graspable asperities from the sampled heightfield.

#include <cstddef>
#include <cstdint>
#include <vector>

#include "cliffsim/common.hpp"

namespace cliffsim::terrain {

struct TerrainParams {
  double fractalDim = 2.5;     ///< D_s, strictly between 2 and 3
  double roughnessAmp = 1e-5;  ///< G [m]
  double sampleLength = 2e-3;  ///< L [m]
  double gammaFreq = 1.5;      ///< frequency ratio between scales, > 1
  int ridgeCount = 10;         ///< number of superposed ridge directions
  int maxFreqIndex = 11;       ///< highest scale index (inclusive)
  std::uint64_t phaseSeed = 1;
};

/// Throws DomainError when any invariant is violated.
void validate(const TerrainParams& params);

/// Amplitude constant C = L (G/L)^(D_s-2) sqrt(ln(gamma)/M).
double amplitude_constant(const TerrainParams& params);

/// Largest scale index whose wavelength still spans one lattice spacing,
/// i.e. floor(log(L/spacing) / log(gamma)).
int nyquist_max_freq_index(double sampleLength, double spacing,
                           double gammaFreq);

/// Pre-tabulated surface: phases are drawn once, heights evaluated on demand.
class WmSurface {
 public:
  explicit WmSurface(const TerrainParams& params);

  double height(double x, double y) const;
  const TerrainParams& params() const { return params_; }
  double phase(int ridge, int scale) const;

 private:
  TerrainParams params_;
  double amplitude_;
  std::vector<double> phases_;      // [ridge][scale]
  std::vector<double> scaleAmp_;    // gamma^((D_s-3) n)
  std::vector<double> waveNumber_;  // 2 pi gamma^n / L
  std::vector<double> dirCos_, dirSin_;
};

/// Height z(x, y) in metres. Builds the phase table on every call; use
/// WmSurface when sampling many points.
double wm_height(const TerrainParams& params, double x, double y);

/// Immutable regular lattice of heights. Row index i runs along +y
/// (up the wall), column index j along +x.
struct TerrainPatch {
  TerrainParams params;
  double originX = 0.0;
  double originY = 0.0;
  double spacing = 0.0;
  std::size_t rows = 0;
  std::size_t cols = 0;
  std::vector<double> heights;  // row-major

  double at(std::size_t i, std::size_t j) const { return heights[i * cols + j]; }
  double x(std::size_t j) const { return originX + static_cast<double>(j) * spacing; }
  double y(std::size_t i) const { return originY + static_cast<double>(i) * spacing; }
  double rms() const;
  void check() const;
};

TerrainPatch generate_patch(const TerrainParams& params, double extent,
                            double spacing, double originX = 0.0,
                            double originY = 0.0);

struct Asperity {
  Vec3 position = Vec3::Zero();
  double tipRadius = 0.0;    ///< r_a [m]
  double normalAngle = 0.0;  ///< [rad], 0 = facing straight out of the wall
};

/// One asperity per strict interior local maximum.
///
/// The 3x3 neighbourhood is fitted with a least-squares quadric
/// z = a + b u + c v + d u^2 + e u v + f v^2. The tip radius is the inverse
/// mean curvature of that quadric at the peak. The normal angle is the
/// steepest up-facing normal on a spherical cap of that radius whose sag
/// matches the fitted drop one lattice step up the wall: a spine dragged
/// down the wall meets that flank first.
std::vector<Asperity> extract_asperities(const TerrainPatch& patch);

}  // namespace cliffsim::terrain
