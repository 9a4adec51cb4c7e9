#include "cliffsim/rng.hpp"

namespace cliffsim::rng {

std::uint64_t Stream::bits(std::uint64_t a, std::uint64_t b,
                           std::uint64_t c) const {
  std::uint64_t h = mix64(key_ ^ 0x243f6a8885a308d3ULL);
  h = mix64(h ^ a);
  h = mix64(h ^ (b + 0x13198a2e03707344ULL));
  h = mix64(h ^ (c + 0xa4093822299f31d0ULL));
  return h;
}

std::uint64_t derive_seed(std::uint64_t seed, std::uint64_t a,
                          std::uint64_t b, std::uint64_t c) {
  return Stream(seed, "derive").bits(a, b, c);
}

}  // namespace cliffsim::rng
