#pragma once

#include <cstdint>
#include <random>

namespace convexmix {

/// Uniform double in [0,1) from the top 53 bits. Unlike
/// std::uniform_real_distribution this is identical across standard libraries,
/// which keeps seeded audits reproducible everywhere.
inline double unit_uniform(std::mt19937_64& rng) {
  return static_cast<double>(rng() >> 11) * 0x1.0p-53;
}

inline double uniform(std::mt19937_64& rng, double lo, double hi) { return lo + (hi - lo) * unit_uniform(rng); }

}  // namespace convexmix
