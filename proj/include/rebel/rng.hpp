#pragma once

#include <cstdint>

namespace rebel {

// Counter-based generator: output i of stream s under seed k is a pure function
// of (k, s, i), so any replication or substream can be reproduced in isolation
// and results cannot depend on which thread consumed which stream.
//
// Construction: the (seed, stream) pair is hashed into a 64-bit key; successive
// outputs apply the splitmix64 finalizer to key + i * golden gamma. This is the
// same construction as java.util.SplittableRandom's mixing path.
class SplitRng {
public:
  explicit SplitRng(std::uint64_t seed, std::uint64_t stream = 0)
      : key_(derive_key(seed, stream)) {}

  std::uint64_t next_u64() { return mix(key_ + (++counter_) * kGamma); }

  // Uniform on [0, 1), 53 random bits.
  double next_uniform() {
    return static_cast<double>(next_u64() >> 11) * 0x1.0p-53;
  }

  // Uniform on (0, 1), never exactly 0 or 1; safe for inverse-CDF transforms.
  double next_uniform_open() {
    return (static_cast<double>(next_u64() >> 11) + 0.5) * 0x1.0p-53;
  }

  // Standard normal via the inverse CDF (deterministic, loop-free).
  double next_gaussian();

  // Independent stream derived from the same seed; order of split() calls
  // does not matter, only the stream index does.
  SplitRng split(std::uint64_t stream) const { return SplitRng(key_, stream); }

  static std::uint64_t mix(std::uint64_t z) {
    z ^= z >> 30;
    z *= 0xbf58476d1ce4e5b9ULL;
    z ^= z >> 27;
    z *= 0x94d049bb133111ebULL;
    z ^= z >> 31;
    return z;
  }

  // Stable per-replication seed derivation used by the Monte Carlo harness.
  static std::uint64_t derive(std::uint64_t seed, std::uint64_t index) {
    return mix(mix(seed + kGamma) ^ mix(index * kGamma + 0x632be59bd9b4e019ULL));
  }

private:
  static std::uint64_t derive_key(std::uint64_t seed, std::uint64_t stream) {
    return mix(mix(seed + kGamma) + mix(stream ^ 0x9e3779b97f4a7c15ULL) * kGamma);
  }

  static constexpr std::uint64_t kGamma = 0x9e3779b97f4a7c15ULL;

  std::uint64_t key_;
  std::uint64_t counter_ = 0;
};

}  // namespace rebel
