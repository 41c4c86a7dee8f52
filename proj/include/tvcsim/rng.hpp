#pragma once

#include <cmath>
#include <cstdint>
#include <random>

namespace tvcsim {

// splitmix64 mix step; used to derive independent per-run seeds.
inline std::uint64_t mix64(std::uint64_t x) {
  x += 0x9E3779B97F4A7C15ull;
  x = (x ^ (x >> 30)) * 0xBF58476D1CE4E5B9ull;
  x = (x ^ (x >> 27)) * 0x94D049BB133111EBull;
  return x ^ (x >> 31);
}

inline std::uint64_t derive_seed(std::uint64_t base, std::uint64_t stream) {
  return mix64(base ^ mix64(stream));
}

// Standard normal via Box-Muller on explicit 53-bit uniforms. Two generator
// calls per variate, bit-reproducible for a given seed on any toolchain
// (std::normal_distribution's algorithm is implementation-defined).
inline double normal_variate(std::mt19937_64& rng) {
  constexpr double kTwoPi = 6.283185307179586;
  const double u1 = ((rng() >> 11) + 1.0) * 0x1.0p-53; // (0, 1]
  const double u2 = (rng() >> 11) * 0x1.0p-53;         // [0, 1)
  return std::sqrt(-2.0 * std::log(u1)) * std::cos(kTwoPi * u2);
}

} // namespace tvcsim
