#include "cliffsim/grip.hpp"

#include <cmath>
#include <numeric>

#include "cliffsim/rng.hpp"

namespace cliffsim::grip {

void validate(const SpineSpec& s) {
  if (!(s.tipRadius > 0.0 && s.shaftDiameter > 0.0 && s.tensileStrength > 0.0 &&
        s.elasticModulus > 0.0)) {
    throw DomainError("spine: geometry and material constants must be positive");
  }
  if (!(s.frictionCoeff > 0.0)) throw DomainError("spine: frictionCoeff must be positive");
  if (!(s.loadAngle > 0.0 && s.loadAngle < kPi / 2)) {
    throw DomainError("spine: loadAngle must lie in (0, pi/2)");
  }
}

SpineArray make_spine_array(int count, double rMin, double rMax, const SpineSpec& base,
                            double skinDiameter) {
  if (count < 1) throw DomainError("spine array: count must be positive");
  if (!(rMin > 0.0 && rMax >= rMin)) throw DomainError("spine array: bad radius range");
  if (!(skinDiameter > 0.0)) throw DomainError("spine array: skin diameter must be positive");
  SpineArray array;
  array.spines.reserve(count);
  for (int i = 0; i < count; ++i) {
    SpineSpec s = base;
    s.tipRadius = count == 1 ? 0.5 * (rMin + rMax)
                             : rMin + (rMax - rMin) * i / static_cast<double>(count - 1);
    array.spines.push_back(s);
  }
  array.areaDensity = count / (kPi * skinDiameter * skinDiameter);
  return array;
}

double theta_min(const SpineSpec& spec) {
  if (!(spec.frictionCoeff > 0.0)) throw DomainError("theta_min: friction must be positive");
  // arccot(mu) for mu > 0
  return spec.loadAngle + std::atan(1.0 / spec.frictionCoeff);
}

double effective_radius(double spineRadius, double asperityRadius) {
  if (!(spineRadius > 0.0 && asperityRadius > 0.0)) {
    throw DomainError("effective_radius: radii must be positive");
  }
  return 1.0 / (1.0 / spineRadius + 1.0 / asperityRadius);
}

double load_constant(const SpineSpec& spec) {
  const double denom = 1.0 - 2.0 * spec.frictionCoeff;
  if (!(denom > 0.0)) throw DomainError("load_constant: requires frictionCoeff < 0.5");
  const double k = kPi * spec.tensileStrength / denom;
  return k * k * k / (2.0 * spec.elasticModulus * spec.elasticModulus);
}

double max_spine_load(const SpineSpec& spec, const Asperity& asperity,
                      std::optional<double> kappaOverride) {
  const double r = effective_radius(spec.tipRadius, asperity.tipRadius);
  const double kappa = kappaOverride ? *kappaOverride : load_constant(spec);
  return kappa * r * r;
}

bool can_engage(const SpineSpec& spec, const Asperity& asperity) {
  return asperity.tipRadius >= spec.tipRadius && asperity.normalAngle >= theta_min(spec);
}

double engagement_fraction(const SpineSpec& spec, std::span<const Asperity> asperities) {
  if (asperities.empty()) return 0.0;
  std::size_t hits = 0;
  for (const auto& a : asperities) hits += can_engage(spec, a) ? 1 : 0;
  return static_cast<double>(hits) / static_cast<double>(asperities.size());
}

GripState make_grip_state(std::vector<double> perContact) {
  GripState g;
  g.engagedCount = static_cast<int>(perContact.size());
  g.totalCapacity = std::accumulate(perContact.begin(), perContact.end(), 0.0);
  g.perContactCapacity = std::move(perContact);
  return g;
}

GripState sample_grip(const SpineArray& array, std::span<const Asperity> asperities,
                      std::uint64_t seed, const CapacityBand& band) {
  if (array.spines.empty()) throw DomainError("sample_grip: empty spine array");
  if (!band.fixed && !(band.min > 0.0 && band.max >= band.min)) {
    throw DomainError("sample_grip: bad capacity band");
  }
  if (asperities.empty()) return {};

  const rng::Stream engage(seed, "grip.engage");
  const rng::Stream capacity(seed, "grip.capacity");
  std::vector<double> contacts;
  for (std::size_t i = 0; i < array.spines.size(); ++i) {
    const double p = engagement_fraction(array.spines[i], asperities);
    if (!(engage.uniform(i) < p)) continue;
    contacts.push_back(band.fixed ? *band.fixed : capacity.uniform(band.min, band.max, i));
  }
  return make_grip_state(std::move(contacts));
}

}  // namespace cliffsim::grip
