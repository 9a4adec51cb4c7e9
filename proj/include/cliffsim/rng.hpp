#pragma once

#include <cstdint>
#include <string_view>

namespace cliffsim::rng {

/// SplitMix64 finalizer; a bijective 64-bit mixer.
constexpr std::uint64_t mix64(std::uint64_t x) {
  x += 0x9e3779b97f4a7c15ULL;
  x = (x ^ (x >> 30)) * 0xbf58476d1ce4e5b9ULL;
  x = (x ^ (x >> 27)) * 0x94d049bb133111ebULL;
  return x ^ (x >> 31);
}

/// 64-bit FNV-1a over a byte string.
constexpr std::uint64_t fnv1a(std::string_view text) {
  std::uint64_t h = 0xcbf29ce484222325ULL;
  for (char c : text) {
    h ^= static_cast<unsigned char>(c);
    h *= 0x100000001b3ULL;
  }
  return h;
}

/// Counter-based generator: every draw is a pure function of
/// (seed, stream name, counter tuple), so results never depend on call
/// order or on how work is split across threads.
class Stream {
 public:
  Stream(std::uint64_t seed, std::string_view name)
      : key_(mix64(seed ^ mix64(fnv1a(name)))) {}

  std::uint64_t bits(std::uint64_t a, std::uint64_t b = 0,
                     std::uint64_t c = 0) const;

  /// Uniform on [0, 1) with 53 bits of resolution.
  double uniform(std::uint64_t a, std::uint64_t b = 0,
                 std::uint64_t c = 0) const {
    return static_cast<double>(bits(a, b, c) >> 11) * 0x1.0p-53;
  }

  double uniform(double lo, double hi, std::uint64_t a, std::uint64_t b = 0,
                 std::uint64_t c = 0) const {
    return lo + (hi - lo) * uniform(a, b, c);
  }

  std::uint64_t key() const { return key_; }

 private:
  std::uint64_t key_;
};

/// Derive a child seed, e.g. one per robot/cycle/attempt.
std::uint64_t derive_seed(std::uint64_t seed, std::uint64_t a,
                          std::uint64_t b = 0, std::uint64_t c = 0);

}  // namespace cliffsim::rng
