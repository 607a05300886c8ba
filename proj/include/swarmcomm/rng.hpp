#pragma once
// Seeding and random draws with bit-exact results on every platform.
// std::mt19937_64 is fully specified by the standard; the distribution
// helpers below replace the implementation-defined std:: distributions.

#include <cstdint>
#include <numbers>
#include <random>

#include "swarmcomm/geometry.hpp"

namespace swarmcomm {

/// splitmix64 finalizer: a bijective 64-bit mixer.
inline constexpr std::uint64_t mix64(std::uint64_t z) {
  z += 0x9E3779B97F4A7C15ULL;
  z = (z ^ (z >> 30)) * 0xBF58476D1CE4E5B9ULL;
  z = (z ^ (z >> 27)) * 0x94D049BB133111EBULL;
  return z ^ (z >> 31);
}

/// Seed for trial `index` under `base`: mix64(base ^ mix64(index)).
inline constexpr std::uint64_t trial_seed(std::uint64_t base, std::uint64_t index) {
  return mix64(base ^ mix64(index));
}

class Rng {
 public:
  explicit Rng(std::uint64_t seed) : engine_(mix64(seed)) {}

  /// Uniform in [0, 1) with 53 random bits.
  double uniform() { return static_cast<double>(engine_() >> 11) * 0x1.0p-53; }
  double uniform(double lo, double hi) { return lo + (hi - lo) * uniform(); }

  /// Uniform integer in [0, n), n > 0 (rejection sampling, no modulo bias).
  std::uint64_t below(std::uint64_t n) {
    const std::uint64_t limit = UINT64_MAX - UINT64_MAX % n;
    std::uint64_t v;
    do v = engine_(); while (v >= limit);
    return v % n;
  }

  double angle() { return uniform(-std::numbers::pi, std::numbers::pi); }

  /// Uniform point in the disc of radius `r` about `c`.
  Vec2 in_disc(const Vec2& c, double r) {
    const double rr = r * std::sqrt(uniform());
    const double a = angle();
    return c + Vec2{rr * std::cos(a), rr * std::sin(a)};
  }

  std::uint64_t next() { return engine_(); }

 private:
  std::mt19937_64 engine_;
};

/// Order-independent random direction keyed on (seed, a, b, c); used where a
/// draw must not depend on the order in which agents are processed.
inline Vec2 keyed_direction(std::uint64_t seed, std::uint64_t a, std::uint64_t b, std::uint64_t c) {
  const std::uint64_t h = mix64(mix64(mix64(seed ^ a) ^ b) ^ c);
  const double u = static_cast<double>(h >> 11) * 0x1.0p-53;
  const double ang = (2.0 * u - 1.0) * std::numbers::pi;
  return heading_vector(ang);
}

}  // namespace swarmcomm
