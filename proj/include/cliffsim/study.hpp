#pragma once

// Reliability Monte Carlo (failure probability against spines per robot)
// and the system-size trade study.

#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include "cliffsim/common.hpp"
#include "cliffsim/grip.hpp"

namespace cliffsim::study {

/// Real-valued spine requirement N m g / (load (N - n)).
double critical_spines_real(int robots, int hopping, double mass, double gravity,
                            double perContactLoad);

/// floor of critical_spines_real; throws DomainError unless N > n >= 1.
int critical_spines(int robots, int hopping, double mass, double gravity,
                    double perContactLoad);

struct ReliabilityModel {
  double robotMass = 3.0;
  double gravity = 3.71;
  grip::CapacityBand band;  ///< per-contact capacity, uniform on [min, max)
  /// Draw capacities from this empirical set instead of the band (e.g.
  /// terrain-derived loads); empty means band only.
  std::vector<double> capacityPool;
};

struct CurvePoint {
  int robots = 0;
  int failed = 0;
  int spines = 0;
  long long failures = 0;
  long long trials = 0;
  double probability() const { return static_cast<double>(failures) / static_cast<double>(trials); }
};

/// Probability that the k (N - n_failed) contacts of the still-anchored
/// robots hold less than the whole system weight N m g. Each trial draws
/// every contact from a counter-based stream keyed by (seed, trial, robot,
/// spine), so curves over k use common random numbers and are exactly
/// non-increasing. Threads only partition trials; results do not depend on
/// the thread count.
double failure_probability(const ReliabilityModel& model, int robots, int failed, int spines,
                           long long trials, std::uint64_t seed, int threads = 1);

/// One point per k in [kMin, kMax].
std::vector<CurvePoint> failure_curve(const ReliabilityModel& model, int robots, int failed,
                                      int kMin, int kMax, long long trials, std::uint64_t seed,
                                      int threads = 1);

/// Pool of per-contact capacities from a terrain census: the single-contact
/// limit of every engageable (spine, asperity) pair, clipped to the band.
std::vector<double> terrain_capacity_pool(const grip::SpineArray& array,
                                          const std::vector<terrain::Asperity>& asperities,
                                          const grip::CapacityBand& band,
                                          std::optional<double> kappa = std::nullopt);

enum class OverlapModel {
  AllPairs,     ///< every pair of footprints overlaps: M = N(N-1)/2
  TetherEdges,  ///< hub-and-spoke edges: M = N
  Chain,        ///< neighbours in a line: M = N - 1
};
const char* to_string(OverlapModel model);
std::optional<OverlapModel> overlap_model_by_name(const std::string& name);

struct TradeStudyConfig {
  double robotMass = 3.0;
  double gravity = 3.71;
  double perContactLoad = 1.5;    ///< [N]
  double hopDistance = 1.27;      ///< d [m]
  double hopTime = 1.5;           ///< t [s]
  double propellantBudget = 1000.0;  ///< [g]
  double propellantPerHop = 5.0;     ///< [g]
  double instrumentRange = 0.75;     ///< r [m]
  double robotSeparation = 1.2;      ///< sep [m]
  OverlapModel overlap = OverlapModel::AllPairs;
  std::optional<int> overlapCount;   ///< fixed M, overrides the model
  std::vector<int> systemSizes{2, 3, 4, 5, 6, 7, 8};
  int hopBatch = 1;
};

void validate(const TradeStudyConfig& config);

struct TradeMetrics {
  int robots = 0;
  bool feasible = true;   ///< N > n
  double spines = 0.0;    ///< S, real-valued
  double distance = 0.0;  ///< D [m]
  double time = 0.0;      ///< T [s]
  double coverage = 0.0;  ///< [m^2]
  double links = 0.0;     ///< N choose 2
};

/// Footprint overlap area of two discs of radius r at centre distance sep.
double lens_area(double r, double sep);

TradeMetrics trade_metrics(const TradeStudyConfig& config, int robots);

struct NormalisedMetrics {
  double spines = 0.0;
  double time = 0.0;
  double coverage = 0.0;
  double links = 0.0;
};

struct SensitivityCase {
  std::string parameter;
  double factor = 1.0;
  std::vector<int> argmax;
};

struct FitnessReport {
  std::vector<TradeMetrics> raw;
  std::vector<NormalisedMetrics> normalised;
  std::vector<double> fitness;
  std::vector<int> argmax;  ///< all N sharing the best fitness
  std::vector<int> argmin;
  std::vector<SensitivityCase> sensitivity;  ///< +-10% on r and sep
  bool argmaxStable = true;  ///< argmax unchanged in every sensitivity case
};

/// Min-max normalise S, T, links (lower is better) and coverage (higher is
/// better) over the feasible sizes and multiply. D is constant in N and
/// left out. A metric with zero range scores 1; infeasible sizes score 0.
FitnessReport fitness_study(const TradeStudyConfig& config, bool withSensitivity = true);

}  // namespace cliffsim::study
