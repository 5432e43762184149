#pragma once

#include <cmath>
#include <cstdint>

namespace crowdwise {

/// Counter-based generator: every draw is a pure hash of
/// (seed, trial, individual, salt), so trials can be evaluated in any order
/// or in parallel and still reproduce bitwise.
class KeyedRng {
 public:
  explicit KeyedRng(std::uint64_t seed) : seed_(seed) {}

  std::uint64_t seed() const { return seed_; }

  /// Uniform in (0, 1).
  double uniform01(std::uint64_t trial, std::uint64_t individual,
                   std::uint64_t salt = 0) const {
    const std::uint64_t bits = hash(trial, individual, salt);
    // 53-bit mantissa, then shift off zero.
    return (static_cast<double>(bits >> 11) + 0.5) * 0x1.0p-53;
  }

  /// Standard normal via Box-Muller on salts (2*salt, 2*salt+1).
  double gaussian(std::uint64_t trial, std::uint64_t individual,
                  std::uint64_t salt = 0) const {
    const double u1 = uniform01(trial, individual, 2 * salt);
    const double u2 = uniform01(trial, individual, 2 * salt + 1);
    return std::sqrt(-2.0 * std::log(u1)) * std::cos(6.283185307179586476925287 * u2);
  }

 private:
  static std::uint64_t mix(std::uint64_t z) {
    // splitmix64 finalizer
    z += 0x9e3779b97f4a7c15ULL;
    z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ULL;
    z = (z ^ (z >> 27)) * 0x94d049bb133111ebULL;
    return z ^ (z >> 31);
  }

  std::uint64_t hash(std::uint64_t trial, std::uint64_t individual,
                     std::uint64_t salt) const {
    return mix(mix(mix(mix(seed_) ^ trial) ^ individual) ^ salt);
  }

  std::uint64_t seed_;
};

}  // namespace crowdwise
