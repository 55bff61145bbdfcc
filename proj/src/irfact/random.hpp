#ifndef IRFACT_RANDOM_HPP_
#define IRFACT_RANDOM_HPP_

#include <cstdint>
#include <random>
#include <string_view>

namespace irf {

using Rng = std::mt19937_64;

// splitmix64 finalizer; spreads nearby seeds across the state space.
inline std::uint64_t mix_seed(std::uint64_t x) {
  x += 0x9e3779b97f4a7c15ULL;
  x = (x ^ (x >> 30)) * 0xbf58476d1ce4e5b9ULL;
  x = (x ^ (x >> 27)) * 0x94d049bb133111ebULL;
  return x ^ (x >> 31);
}

// Named sub-seed: FNV-1a over the stage name, folded with the parent seed.
inline std::uint64_t derive_seed(std::uint64_t seed, std::string_view stage) {
  std::uint64_t h = 0xcbf29ce484222325ULL;
  for (unsigned char c : stage) {
    h ^= c;
    h *= 0x100000001b3ULL;
  }
  return mix_seed(seed ^ h);
}

inline Rng make_rng(std::uint64_t seed) { return Rng(mix_seed(seed)); }

}  // namespace irf

#endif  // IRFACT_RANDOM_HPP_
