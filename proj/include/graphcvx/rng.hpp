#pragma once

// Portable random draws. The standard distributions are implementation
// defined, so anything that must be bit-reproducible across toolchains goes
// through these helpers on top of std::mt19937_64 (whose output is fixed by
// the standard).

#include <cmath>
#include <cstdint>
#include <numbers>
#include <random>

namespace graphcvx::rng {

using Engine = std::mt19937_64;

// Uniform integer in [0, bound) by rejection; bound > 0.
inline std::uint64_t below(Engine& eng, std::uint64_t bound) {
  const std::uint64_t limit = UINT64_MAX - (UINT64_MAX % bound);
  std::uint64_t x;
  do {
    x = eng();
  } while (x >= limit);
  return x % bound;
}

// Uniform double in [0, 1) with 53 random bits.
inline double unit(Engine& eng) {
  return static_cast<double>(eng() >> 11) * 0x1.0p-53;
}

// Standard normal via Box-Muller; consumes two engine draws per call.
inline double normal(Engine& eng) {
  double u1;
  do {
    u1 = unit(eng);
  } while (u1 <= 0.0);
  const double u2 = unit(eng);
  return std::sqrt(-2.0 * std::log(u1)) *
         std::cos(2.0 * std::numbers::pi * u2);
}

}  // namespace graphcvx::rng
