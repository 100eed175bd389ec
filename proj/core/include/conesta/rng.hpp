#pragma once

#include <cstdint>
#include <random>

namespace conesta {

// Seedable generator with platform-independent uniform and normal draws.
//
// The engine is std::mt19937_64. Distribution mapping is done here rather
// than through <random> distributions, whose outputs differ between
// standard library implementations.
//
// Streams: `Rng(seed, stream)` seeds the engine with
// splitmix64(seed ^ splitmix64(stream)), so each named draw (covariance,
// design matrix, coefficients, residual, ...) has its own independent
// sequence and can be regenerated without replaying the others.
class Rng {
 public:
  explicit Rng(std::uint64_t seed, std::uint64_t stream = 0);

  // Uniform on [0, 1) with 53 random bits.
  double uniform();
  // Uniform on [lo, hi).
  double uniform(double lo, double hi) { return lo + (hi - lo) * uniform(); }
  // Normal via the Box-Muller transform (pairs are cached).
  double normal(double mean = 0.0, double stddev = 1.0);

  std::uint64_t next_u64() { return engine_(); }

 private:
  std::mt19937_64 engine_;
  bool has_spare_ = false;
  double spare_ = 0.0;
};

std::uint64_t splitmix64(std::uint64_t x);

// Named streams used by the simulation module.
namespace streams {
inline constexpr std::uint64_t covariance = 1;
inline constexpr std::uint64_t design_matrix = 2;
inline constexpr std::uint64_t coefficients = 3;
inline constexpr std::uint64_t residual = 4;
inline constexpr std::uint64_t subgradient = 5;
}  // namespace streams

}  // namespace conesta
