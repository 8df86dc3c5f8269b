#pragma once

#include <cstdint>
#include <random>

namespace mapd {

using Rng = std::mt19937_64;

// Uniform draw in [0, n). Rejection sampling on the raw engine output so the
// sequence does not depend on the standard library's distribution code.
inline std::uint64_t uniform_index(Rng& rng, std::uint64_t n) {
  const std::uint64_t limit = Rng::max() - (Rng::max() % n + 1) % n;
  std::uint64_t r = rng();
  while (r > limit) r = rng();
  return r % n;
}

// splitmix64 finalizer, used to derive child seeds.
inline std::uint64_t mix_seed(std::uint64_t a, std::uint64_t b) {
  std::uint64_t z = a + 0x9e3779b97f4a7c15ULL * (b + 1);
  z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ULL;
  z = (z ^ (z >> 27)) * 0x94d049bb133111ebULL;
  return z ^ (z >> 31);
}

}  // namespace mapd
