#include "cliffsim/terrain.hpp"

#include <Eigen/Dense>
#include <algorithm>
#include <cmath>
#include <string>

#include "cliffsim/rng.hpp"

namespace cliffsim::terrain {

void validate(const TerrainParams& p) {
  if (!(p.fractalDim > 2.0 && p.fractalDim < 3.0)) {
    throw DomainError("terrain: fractalDim must lie in (2, 3)");
  }
  if (!(p.gammaFreq > 1.0)) throw DomainError("terrain: gammaFreq must exceed 1");
  if (!(p.sampleLength > 0.0)) throw DomainError("terrain: sampleLength must be positive");
  if (!(p.roughnessAmp >= 0.0)) throw DomainError("terrain: roughnessAmp must be non-negative");
  if (p.ridgeCount < 1) throw DomainError("terrain: ridgeCount must be positive");
  if (p.maxFreqIndex < 0) throw DomainError("terrain: maxFreqIndex must be non-negative");
}

double amplitude_constant(const TerrainParams& p) {
  validate(p);
  return p.sampleLength * std::pow(p.roughnessAmp / p.sampleLength, p.fractalDim - 2.0) *
         std::sqrt(std::log(p.gammaFreq) / p.ridgeCount);
}

int nyquist_max_freq_index(double sampleLength, double spacing, double gammaFreq) {
  if (!(sampleLength > 0.0 && spacing > 0.0 && gammaFreq > 1.0)) {
    throw DomainError("terrain: nyquist index needs positive lengths and gamma > 1");
  }
  const double n = std::log(sampleLength / spacing) / std::log(gammaFreq);
  return std::max(0, static_cast<int>(std::floor(n + 1e-9)));
}

WmSurface::WmSurface(const TerrainParams& params)
    : params_(params), amplitude_(amplitude_constant(params)) {
  const int scales = params.maxFreqIndex + 1;
  rng::Stream stream(params.phaseSeed, "terrain.phase");
  phases_.resize(static_cast<std::size_t>(params.ridgeCount) * scales);
  for (int m = 0; m < params.ridgeCount; ++m) {
    for (int n = 0; n < scales; ++n) {
      phases_[static_cast<std::size_t>(m) * scales + n] =
          2.0 * kPi * stream.uniform(static_cast<std::uint64_t>(m + 1),
                                     static_cast<std::uint64_t>(n));
    }
  }
  for (int n = 0; n < scales; ++n) {
    scaleAmp_.push_back(std::pow(params.gammaFreq, (params.fractalDim - 3.0) * n));
    waveNumber_.push_back(2.0 * kPi * std::pow(params.gammaFreq, n) / params.sampleLength);
  }
  // r cos(atan2(y, x) - pi m / M) == x cos(pi m / M) + y sin(pi m / M)
  for (int m = 1; m <= params.ridgeCount; ++m) {
    const double angle = kPi * m / params.ridgeCount;
    dirCos_.push_back(std::cos(angle));
    dirSin_.push_back(std::sin(angle));
  }
}

double WmSurface::phase(int ridge, int scale) const {
  return phases_[static_cast<std::size_t>(ridge) * (params_.maxFreqIndex + 1) + scale];
}

double WmSurface::height(double x, double y) const {
  if (amplitude_ == 0.0) return 0.0;
  const int scales = params_.maxFreqIndex + 1;
  double sum = 0.0;
  for (int m = 0; m < params_.ridgeCount; ++m) {
    const double along = x * dirCos_[m] + y * dirSin_[m];
    for (int n = 0; n < scales; ++n) {
      const double phi = phases_[static_cast<std::size_t>(m) * scales + n];
      sum += scaleAmp_[n] * (std::cos(phi) - std::cos(waveNumber_[n] * along + phi));
    }
  }
  return amplitude_ * sum;
}

double wm_height(const TerrainParams& params, double x, double y) {
  return WmSurface(params).height(x, y);
}

double TerrainPatch::rms() const {
  if (heights.empty()) return 0.0;
  double mean = 0.0;
  for (double z : heights) mean += z;
  mean /= static_cast<double>(heights.size());
  double acc = 0.0;
  for (double z : heights) acc += (z - mean) * (z - mean);
  return std::sqrt(acc / static_cast<double>(heights.size()));
}

void TerrainPatch::check() const {
  if (!(spacing > 0.0)) throw DomainError("patch: spacing must be positive");
  if (heights.size() != rows * cols) throw DomainError("patch: grid size mismatch");
  for (double z : heights) {
    if (!std::isfinite(z)) throw DomainError("patch: non-finite height");
  }
}

TerrainPatch generate_patch(const TerrainParams& params, double extent, double spacing,
                            double originX, double originY) {
  if (!(spacing > 0.0) || !(extent > spacing)) {
    throw DomainError("generate_patch: need extent > spacing > 0");
  }
  const WmSurface surface(params);
  TerrainPatch patch;
  patch.params = params;
  patch.originX = originX;
  patch.originY = originY;
  patch.spacing = spacing;
  const auto n = static_cast<std::size_t>(std::floor(extent / spacing + 1e-9)) + 1;
  patch.rows = n;
  patch.cols = n;
  patch.heights.resize(n * n);
  for (std::size_t i = 0; i < n; ++i) {
    for (std::size_t j = 0; j < n; ++j) {
      patch.heights[i * n + j] = surface.height(patch.x(j), patch.y(i));
    }
  }
  patch.check();
  return patch;
}

namespace {

// Least-squares projector from the 9 stencil samples (row-major, v then u,
// unit spacing) to quadric coefficients [a b c d e f].
const Eigen::Matrix<double, 6, 9>& quadric_projector() {
  static const Eigen::Matrix<double, 6, 9> projector = [] {
    Eigen::Matrix<double, 9, 6> design;
    int k = 0;
    for (int dv = -1; dv <= 1; ++dv) {
      for (int du = -1; du <= 1; ++du, ++k) {
        design.row(k) << 1.0, du, dv, du * du, du * dv, dv * dv;
      }
    }
    const Eigen::Matrix<double, 6, 6> normal = design.transpose() * design;
    return Eigen::Matrix<double, 6, 9>(normal.ldlt().solve(design.transpose()));
  }();
  return projector;
}

}  // namespace

std::vector<Asperity> extract_asperities(const TerrainPatch& patch) {
  patch.check();
  if (patch.rows < 3 || patch.cols < 3) {
    throw DomainError("extract_asperities: patch needs at least 3x3 points");
  }
  const double s = patch.spacing;
  const auto& projector = quadric_projector();
  std::vector<Asperity> out;

  for (std::size_t i = 1; i + 1 < patch.rows; ++i) {
    for (std::size_t j = 1; j + 1 < patch.cols; ++j) {
      const double center = patch.at(i, j);
      Eigen::Matrix<double, 9, 1> samples;
      bool strictMax = true;
      int k = 0;
      for (int dv = -1; dv <= 1; ++dv) {
        for (int du = -1; du <= 1; ++du, ++k) {
          const double z = patch.at(i + dv, j + du);
          samples(k) = z;
          if ((du != 0 || dv != 0) && !(z < center)) strictMax = false;
        }
      }
      if (!strictMax) continue;

      // Coefficients in lattice units; rescale to metres.
      const Eigen::Matrix<double, 6, 1> c = projector * samples;
      const double zx = c(1) / s;
      const double zy = c(2) / s;
      const double zxx = 2.0 * c(3) / (s * s);
      const double zxy = c(4) / (s * s);
      const double zyy = 2.0 * c(5) / (s * s);
      const double g2 = 1.0 + zx * zx + zy * zy;
      const double meanCurv =
          -((1.0 + zy * zy) * zxx - 2.0 * zx * zy * zxy + (1.0 + zx * zx) * zyy) /
          (2.0 * std::pow(g2, 1.5));
      if (!(meanCurv > 0.0) || !std::isfinite(meanCurv)) continue;
      const double radius = 1.0 / meanCurv;
      if (!std::isfinite(radius)) continue;

      const double sagUp = -(c(2) + c(5));  // z(0,0) - z(0,+1) on the fit
      const double cosAngle = std::clamp(1.0 - sagUp / radius, -1.0, 1.0);

      Asperity a;
      a.position = Vec3(patch.x(j), patch.y(i), center);
      a.tipRadius = radius;
      a.normalAngle = std::acos(cosAngle);
      out.push_back(a);
    }
  }
  return out;
}

}  // namespace cliffsim::terrain
