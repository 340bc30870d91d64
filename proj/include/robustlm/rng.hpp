#pragma once

#include <cmath>
#include <cstdint>
#include <numbers>

namespace robustlm {

/// Counter-based pseudo-random generator keyed by (seed, stream).
///
/// Output i is a pure function of (seed, stream, i), so identical keys give
/// identical sequences on every platform and parallel replications can each
/// own a stream without coordination. The mixing function is the SplitMix64
/// finalizer over a Weyl sequence started at a per-stream key.
class Rng {
 public:
  explicit Rng(std::uint64_t seed, std::uint64_t stream = 0)
      : key_(derive_key(seed, stream)), counter_(0) {}

  std::uint64_t next_u64() {
    return mix(key_ + (counter_++) * kGamma);
  }

  /// Uniform draw in [0, 1).
  double uniform01() {
    return static_cast<double>(next_u64() >> 11) * 0x1.0p-53;
  }

  /// Uniform draw in (0, 1].
  double uniform01_open_low() {
    return static_cast<double>((next_u64() >> 11) + 1) * 0x1.0p-53;
  }

  double uniform(double lo, double hi) { return lo + (hi - lo) * uniform01(); }

  /// Standard normal via Box-Muller; consumes exactly two uniforms.
  double normal() {
    const double u1 = uniform01_open_low();
    const double u2 = uniform01();
    return std::sqrt(-2.0 * std::log(u1)) *
           std::cos(2.0 * std::numbers::pi * u2);
  }

  /// Integer in [0, n).
  std::uint64_t below(std::uint64_t n) {
    // Multiply-shift reduction; bias is negligible for n << 2^64.
    return static_cast<std::uint64_t>(
        (static_cast<unsigned __int128>(next_u64()) * n) >> 64);
  }

 private:
  static constexpr std::uint64_t kGamma = 0x9e3779b97f4a7c15ULL;

  static std::uint64_t mix(std::uint64_t z) {
    z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ULL;
    z = (z ^ (z >> 27)) * 0x94d049bb133111ebULL;
    return z ^ (z >> 31);
  }

  static std::uint64_t derive_key(std::uint64_t seed, std::uint64_t stream) {
    return mix(mix(seed + kGamma) ^ mix(stream + 0x6a09e667f3bcc909ULL));
  }

  std::uint64_t key_;
  std::uint64_t counter_;
};

}  // namespace robustlm
