#include "cliffsim/study.hpp"

#include <algorithm>
#include <cmath>
#include <functional>
#include <limits>
#include <thread>

#include "cliffsim/rng.hpp"

namespace cliffsim::study {

double critical_spines_real(int robots, int hopping, double mass, double gravity,
                            double perContactLoad) {
  if (hopping < 1 || robots <= hopping)
    throw DomainError("critical_spines: need N > n >= 1");
  if (!(mass > 0.0) || !(gravity > 0.0) || !(perContactLoad > 0.0))
    throw DomainError("critical_spines: mass, gravity and load must be positive");
  return robots * mass * gravity / (perContactLoad * (robots - hopping));
}

int critical_spines(int robots, int hopping, double mass, double gravity, double perContactLoad) {
  return static_cast<int>(
      std::floor(critical_spines_real(robots, hopping, mass, gravity, perContactLoad)));
}

namespace {

void check_model(const ReliabilityModel& model) {
  if (!(model.robotMass > 0.0) || !(model.gravity > 0.0))
    throw DomainError("reliability: mass and gravity must be positive");
  if (!(model.band.min > 0.0) || !(model.band.max >= model.band.min))
    throw DomainError("reliability: capacity band must satisfy 0 < min <= max");
  for (double c : model.capacityPool)
    if (!(c >= 0.0) || !std::isfinite(c)) throw DomainError("reliability: bad pool capacity");
}

struct Sampler {
  const ReliabilityModel& model;
  rng::Stream stream;

  double draw(std::uint64_t trial, std::uint64_t robot, std::uint64_t spine) const {
    if (model.band.fixed) return *model.band.fixed;
    const double u = stream.uniform(trial, robot, spine);
    if (!model.capacityPool.empty()) {
      auto i = static_cast<std::size_t>(u * static_cast<double>(model.capacityPool.size()));
      return model.capacityPool[std::min(i, model.capacityPool.size() - 1)];
    }
    return model.band.min + (model.band.max - model.band.min) * u;
  }
};

}  // namespace

std::vector<CurvePoint> failure_curve(const ReliabilityModel& model, int robots, int failed,
                                      int kMin, int kMax, long long trials, std::uint64_t seed,
                                      int threads) {
  check_model(model);
  if (trials < 1) throw DomainError("failure_probability: trials must be >= 1");
  if (failed < 0 || robots <= failed) throw DomainError("failure_probability: need N > n_failed >= 0");
  if (kMin < 0 || kMax < kMin) throw DomainError("failure_probability: need 0 <= kMin <= kMax");
  if (threads < 1) throw DomainError("failure_probability: threads must be >= 1");

  const Sampler sampler{model, rng::Stream(seed, "study.capacity")};
  const double weight = robots * model.robotMass * model.gravity;
  const int anchored = robots - failed;
  const std::size_t width = static_cast<std::size_t>(kMax - kMin + 1);

  auto worker = [&](long long begin, long long end, std::vector<long long>& counts) {
    counts.assign(width, 0);
    for (long long t = begin; t < end; ++t) {
      // The anchored robots keep spines 1..k, so adding a spine only adds
      // capacity and each trial's failure indicator is monotone in k.
      double sum = 0.0;
      for (int k = 1; k <= kMax; ++k) {
        for (int r = 0; r < anchored; ++r)
          sum += sampler.draw(static_cast<std::uint64_t>(t), static_cast<std::uint64_t>(r),
                              static_cast<std::uint64_t>(k));
        if (k >= kMin && sum < weight) ++counts[static_cast<std::size_t>(k - kMin)];
      }
      if (kMin == 0 && weight > 0.0) ++counts[0];
    }
  };

  const int workers = static_cast<int>(std::min<long long>(threads, trials));
  std::vector<std::vector<long long>> partial(static_cast<std::size_t>(workers));
  if (workers == 1) {
    worker(0, trials, partial[0]);
  } else {
    std::vector<std::thread> pool;
    for (int w = 0; w < workers; ++w) {
      const long long begin = trials * w / workers, end = trials * (w + 1) / workers;
      pool.emplace_back(worker, begin, end, std::ref(partial[static_cast<std::size_t>(w)]));
    }
    for (auto& th : pool) th.join();
  }

  std::vector<CurvePoint> curve;
  for (std::size_t i = 0; i < width; ++i) {
    CurvePoint p{robots, failed, kMin + static_cast<int>(i), 0, trials};
    for (const auto& c : partial) p.failures += c[i];
    curve.push_back(p);
  }
  return curve;
}

double failure_probability(const ReliabilityModel& model, int robots, int failed, int spines,
                           long long trials, std::uint64_t seed, int threads) {
  return failure_curve(model, robots, failed, spines, spines, trials, seed, threads)
      .front()
      .probability();
}

std::vector<double> terrain_capacity_pool(const grip::SpineArray& array,
                                          const std::vector<terrain::Asperity>& asperities,
                                          const grip::CapacityBand& band,
                                          std::optional<double> kappa) {
  std::vector<double> pool;
  for (const auto& spine : array.spines)
    for (const auto& a : asperities)
      if (grip::can_engage(spine, a))
        pool.push_back(std::clamp(grip::max_spine_load(spine, a, kappa), band.min, band.max));
  return pool;
}

const char* to_string(OverlapModel model) {
  switch (model) {
    case OverlapModel::AllPairs: return "all_pairs";
    case OverlapModel::TetherEdges: return "tether_edges";
    case OverlapModel::Chain: return "chain";
  }
  return "?";
}

std::optional<OverlapModel> overlap_model_by_name(const std::string& name) {
  for (auto m : {OverlapModel::AllPairs, OverlapModel::TetherEdges, OverlapModel::Chain})
    if (name == to_string(m)) return m;
  return std::nullopt;
}

void validate(const TradeStudyConfig& c) {
  for (double v : {c.robotMass, c.gravity, c.perContactLoad, c.hopDistance, c.hopTime,
                   c.propellantBudget, c.propellantPerHop, c.instrumentRange, c.robotSeparation})
    if (!(v > 0.0) || !std::isfinite(v))
      throw DomainError("trade study: physical parameters must be positive");
  if (c.hopBatch < 1) throw DomainError("trade study: hopBatch must be >= 1");
  if (c.overlapCount && *c.overlapCount < 0)
    throw DomainError("trade study: overlapCount must be >= 0");
  int feasible = 0;
  for (int n : c.systemSizes) {
    if (n < 2) throw DomainError("trade study: system sizes must be >= 2");
    if (n > c.hopBatch) ++feasible;
  }
  if (feasible < 2) throw DomainError("trade study: need at least two sizes with N > hopBatch");
}

double lens_area(double r, double sep) {
  if (sep >= 2.0 * r) return 0.0;
  return 2.0 * r * r * std::acos(sep / (2.0 * r)) - 0.5 * sep * std::sqrt(4.0 * r * r - sep * sep);
}

namespace {

double overlap_count(const TradeStudyConfig& c, int n) {
  if (c.overlapCount) return *c.overlapCount;
  switch (c.overlap) {
    case OverlapModel::AllPairs: return n * (n - 1) / 2.0;
    case OverlapModel::TetherEdges: return n;
    case OverlapModel::Chain: return n - 1;
  }
  return 0.0;
}

}  // namespace

TradeMetrics trade_metrics(const TradeStudyConfig& c, int robots) {
  if (std::find(c.systemSizes.begin(), c.systemSizes.end(), robots) == c.systemSizes.end())
    throw DomainError("trade_metrics: N not in systemSizes");
  TradeMetrics m;
  m.robots = robots;
  m.feasible = robots > c.hopBatch;
  m.spines = m.feasible ? critical_spines_real(robots, c.hopBatch, c.robotMass, c.gravity,
                                               c.perContactLoad)
                        : std::numeric_limits<double>::infinity();
  const double hops = c.propellantBudget / c.propellantPerHop;
  m.distance = hops * c.hopDistance;
  m.time = hops * c.hopTime * std::ceil(static_cast<double>(robots) / c.hopBatch);
  const double r = c.instrumentRange;
  m.coverage = robots * kPi * r * r - overlap_count(c, robots) * lens_area(r, c.robotSeparation);
  m.links = robots * (robots - 1) / 2.0;
  return m;
}

namespace {

// Min-max onto [0, 1] with 1 the best; zero range scores 1.
std::vector<double> normalise(const std::vector<double>& v, const std::vector<bool>& use,
                              bool higherBetter) {
  double lo = std::numeric_limits<double>::infinity(), hi = -lo;
  for (std::size_t i = 0; i < v.size(); ++i)
    if (use[i]) lo = std::min(lo, v[i]), hi = std::max(hi, v[i]);
  std::vector<double> out(v.size(), 0.0);
  for (std::size_t i = 0; i < v.size(); ++i) {
    if (!use[i]) continue;
    if (!(hi > lo)) {
      out[i] = 1.0;
      continue;
    }
    const double s = (v[i] - lo) / (hi - lo);
    out[i] = higherBetter ? s : 1.0 - s;
  }
  return out;
}

std::vector<int> ties(const std::vector<int>& sizes, const std::vector<double>& f, bool best) {
  const double target = best ? *std::max_element(f.begin(), f.end())
                             : *std::min_element(f.begin(), f.end());
  const double tol = 1e-12 * std::max(1.0, std::abs(target));
  std::vector<int> out;
  for (std::size_t i = 0; i < f.size(); ++i)
    if (std::abs(f[i] - target) <= tol) out.push_back(sizes[i]);
  return out;
}

}  // namespace

FitnessReport fitness_study(const TradeStudyConfig& config, bool withSensitivity) {
  validate(config);
  FitnessReport rep;
  const std::size_t n = config.systemSizes.size();
  std::vector<bool> use(n);
  std::vector<double> s(n), t(n), cov(n), links(n);
  for (std::size_t i = 0; i < n; ++i) {
    rep.raw.push_back(trade_metrics(config, config.systemSizes[i]));
    const auto& m = rep.raw.back();
    use[i] = m.feasible;
    s[i] = m.spines, t[i] = m.time, cov[i] = m.coverage, links[i] = m.links;
  }
  const auto ns = normalise(s, use, false), nt = normalise(t, use, false),
             nc = normalise(cov, use, true), nl = normalise(links, use, false);
  for (std::size_t i = 0; i < n; ++i) {
    rep.normalised.push_back({ns[i], nt[i], nc[i], nl[i]});
    rep.fitness.push_back(use[i] ? ns[i] * nt[i] * nc[i] * nl[i] : 0.0);
  }
  rep.argmax = ties(config.systemSizes, rep.fitness, true);
  rep.argmin = ties(config.systemSizes, rep.fitness, false);

  if (withSensitivity) {
    for (const char* param : {"instrumentRange", "robotSeparation"})
      for (double f : {0.9, 1.1}) {
        TradeStudyConfig c = config;
        (std::string(param) == "instrumentRange" ? c.instrumentRange : c.robotSeparation) *= f;
        SensitivityCase sc{param, f, fitness_study(c, false).argmax};
        if (sc.argmax != rep.argmax) rep.argmaxStable = false;
        rep.sensitivity.push_back(std::move(sc));
      }
  }
  return rep;
}

}  // namespace cliffsim::study
