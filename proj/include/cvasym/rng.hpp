#pragma once

#include <cstdint>
#include <random>

namespace cvasym {

using Rng = std::mt19937_64;

inline std::uint64_t splitmix64(std::uint64_t x) {
  x += 0x9E3779B97F4A7C15ULL;
  x = (x ^ (x >> 30)) * 0xBF58476D1CE4E5B9ULL;
  x = (x ^ (x >> 27)) * 0x94D049BB133111EBULL;
  return x ^ (x >> 31);
}

// Independent stream per (base seed, replicate, fold).
inline std::uint64_t derive_seed(std::uint64_t base, std::uint64_t replicate,
                                 std::uint64_t fold = 0) {
  std::uint64_t h = splitmix64(base);
  h = splitmix64(h ^ replicate);
  return splitmix64(h ^ (fold + 0x632BE59BD9B4E019ULL));
}

}  // namespace cvasym
