#pragma once

// Microspine / asperity contact mechanics and grip-capacity sampling.

#include <cstdint>
#include <optional>
#include <span>
#include <vector>

#include "cliffsim/common.hpp"
#include "cliffsim/terrain.hpp"

namespace cliffsim::grip {

using terrain::Asperity;

struct SpineSpec {
  double tipRadius = 18.5e-6;       ///< r_s [m]
  double shaftDiameter = 250e-6;    ///< [m]
  double loadAngle = deg2rad(5.0);  ///< [rad], measured from the wall
  double frictionCoeff = 0.2;       ///< spine-tip / rock
  double tensileStrength = 1.5e9;   ///< sigma_max [Pa], hardened steel
  double elasticModulus = 200e9;    ///< E [Pa]
};

void validate(const SpineSpec& spec);

/// Per-contact capacity model used by climbing and reliability runs.
struct CapacityBand {
  double min = 1.0;  ///< [N]
  double max = 2.0;  ///< [N]
  /// When set, every engaged contact carries exactly this load.
  std::optional<double> fixed;
};

struct SpineArray {
  std::vector<SpineSpec> spines;
  double areaDensity = 0.0;  ///< spines per m^2 of skin
};

/// `count` spines whose tip radii are evenly spread over [rMin, rMax]; all
/// other properties copied from `base`. Density is over a sphere of the
/// given diameter.
SpineArray make_spine_array(int count, double rMin, double rMax,
                            const SpineSpec& base, double skinDiameter);

struct GripState {
  int engagedCount = 0;
  std::vector<double> perContactCapacity;  ///< [N]
  double totalCapacity = 0.0;              ///< [N]
};

/// Critical asperity normal angle: theta_load + arccot(mu).
double theta_min(const SpineSpec& spec);

/// Effective contact radius, 1/R = 1/r_s + 1/r_a.
double effective_radius(double spineRadius, double asperityRadius);

/// Material constant kappa in f_max = kappa R^2:
/// (pi sigma_max / (1 - 2 mu))^3 / (2 E^2). Requires mu < 1/2.
double load_constant(const SpineSpec& spec);

/// Raw single-contact strength limit. `kappaOverride` replaces the
/// material constant when the printed grouping is not trusted.
double max_spine_load(const SpineSpec& spec, const Asperity& asperity,
                      std::optional<double> kappaOverride = std::nullopt);

/// Radius rule (r_a >= r_s) and angle rule (theta >= theta_min).
bool can_engage(const SpineSpec& spec, const Asperity& asperity);

/// Fraction of the asperity population this spine could catch.
double engagement_fraction(const SpineSpec& spec, std::span<const Asperity> asperities);

/// One grip event. Each spine makes a single Bernoulli engagement attempt
/// with probability engagement_fraction(); engaged contacts draw a
/// capacity from `band`.
GripState sample_grip(const SpineArray& array, std::span<const Asperity> asperities,
                      std::uint64_t seed, const CapacityBand& band = {});

/// Aggregate a set of per-contact capacities.
GripState make_grip_state(std::vector<double> perContact);

}  // namespace cliffsim::grip
