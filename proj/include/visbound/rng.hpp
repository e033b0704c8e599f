#pragma once

#include <cstdint>

namespace visbound {

// SplitMix64 finalizer.
constexpr std::uint64_t mix64(std::uint64_t z) {
  z += 0x9E3779B97F4A7C15ULL;
  z = (z ^ (z >> 30)) * 0xBF58476D1CE4E5B9ULL;
  z = (z ^ (z >> 27)) * 0x94D049BB133111EBULL;
  return z ^ (z >> 31);
}

/// Counter-based 64-bit generator: the k-th draw is a pure function of
/// (key, k), so any stream can be replayed or split without shared state.
class CounterRng {
 public:
  explicit constexpr CounterRng(std::uint64_t key, std::uint64_t counter = 0)
      : key_(mix64(key)), counter_(counter) {}

  /// Independent stream for sample `index` under `seed`.
  static constexpr CounterRng for_sample(std::uint64_t seed, std::uint64_t index) {
    return CounterRng(seed ^ mix64(index ^ 0xA0761D6478BD642FULL));
  }

  constexpr std::uint64_t next() { return mix64(key_ + 0xD1B54A32D192ED03ULL * counter_++); }

  /// Uniform on [0, 1) with 53 random bits.
  constexpr double uniform() { return static_cast<double>(next() >> 11) * 0x1.0p-53; }

  constexpr std::uint64_t counter() const { return counter_; }

 private:
  std::uint64_t key_;
  std::uint64_t counter_;
};

}  // namespace visbound
