#pragma once

#include <cstdint>
#include <random>

#include "qqm/quaternion.hpp"

namespace test_util {

// Bit-exact uniform in [0,1): independent of std::uniform_real_distribution
// implementation details, so seeded sequences are stable everywhere.
inline double uniform01(std::mt19937_64& rng) {
  return static_cast<double>(rng() >> 11) * 0x1.0p-53;
}

inline double uniform(std::mt19937_64& rng, double lo, double hi) {
  return lo + (hi - lo) * uniform01(rng);
}

inline qqm::Complex random_complex(std::mt19937_64& rng, double scale = 1.0) {
  return {uniform(rng, -scale, scale), uniform(rng, -scale, scale)};
}

inline qqm::Quaternion random_quaternion(std::mt19937_64& rng,
                                         double scale = 1.0) {
  return {random_complex(rng, scale), random_complex(rng, scale)};
}

}  // namespace test_util
