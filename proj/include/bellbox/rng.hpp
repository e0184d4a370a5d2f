#pragma once

#include <cstdint>

namespace bellbox {

/// Counter-derived pseudo-random stream (SplitMix64 core).
///
/// All randomness in the project flows through one root seed; independent
/// streams are derived as derive(root, index). The derivation is pure
/// integer arithmetic, so results are bit-identical across platforms and
/// across any assignment of streams to threads.
class RandomStream {
 public:
  explicit RandomStream(std::uint64_t seed) : state_(seed) {}

  /// Stream for sub-task `index` under `root` seed. Documented scheme:
  /// state = mix(root ^ golden * (index + 1)).
  static RandomStream derive(std::uint64_t root, std::uint64_t index) {
    return RandomStream(mix(root ^ (kGolden * (index + 1))));
  }

  std::uint64_t next_u64() {
    state_ += kGolden;
    return mix(state_);
  }

  /// Uniform double in [0, 1) with 53 random bits.
  double next_unit() { return static_cast<double>(next_u64() >> 11) * 0x1.0p-53; }

  /// Uniform double in [lo, hi).
  double next_in(double lo, double hi) { return lo + (hi - lo) * next_unit(); }

 private:
  static constexpr std::uint64_t kGolden = 0x9E3779B97F4A7C15ULL;

  static std::uint64_t mix(std::uint64_t z) {
    z = (z ^ (z >> 30)) * 0xBF58476D1CE4E5B9ULL;
    z = (z ^ (z >> 27)) * 0x94D049BB133111EBULL;
    return z ^ (z >> 31);
  }

  std::uint64_t state_;
};

}  // namespace bellbox
