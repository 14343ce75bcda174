#pragma once

#include <cstdint>

namespace odeq {

/// Counter-based random stream keyed by (seed, trajectory, step, jump).
///
/// Every sampling event in a run owns an independent stream derived from its
/// coordinates, so trajectories can be distributed over workers in any order
/// and still reproduce bit-identically.
class RngStream {
 public:
  RngStream(std::uint64_t seed, std::uint64_t trajectory, std::uint64_t step,
            std::uint64_t jump)
      : key_(derive_key(seed, trajectory, step, jump)) {}

  /// Uniform double in [0, 1).
  double uniform() {
    const std::uint64_t bits = mix(key_ + kGamma * ++counter_);
    return static_cast<double>(bits >> 11) * 0x1.0p-53;
  }

  /// splitmix64 finalizer; also usable as a standalone integer hash.
  static std::uint64_t mix(std::uint64_t z) {
    z += 0x9E3779B97F4A7C15ULL;
    z = (z ^ (z >> 30)) * 0xBF58476D1CE4E5B9ULL;
    z = (z ^ (z >> 27)) * 0x94D049BB133111EBULL;
    return z ^ (z >> 31);
  }

 private:
  static constexpr std::uint64_t kGamma = 0x9E3779B97F4A7C15ULL;

  static std::uint64_t derive_key(std::uint64_t seed, std::uint64_t trajectory,
                                  std::uint64_t step, std::uint64_t jump) {
    std::uint64_t k = mix(seed);
    k = mix(k ^ (trajectory + kGamma));
    k = mix(k ^ (step + 2 * kGamma));
    k = mix(k ^ (jump + 3 * kGamma));
    return k;
  }

  std::uint64_t key_;
  std::uint64_t counter_ = 0;
};

}  // namespace odeq
