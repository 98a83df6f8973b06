#pragma once

#include <cstdint>
#include <random>

namespace bcst {

inline constexpr std::uint64_t kDefaultSeed = 20130517;

/// Seeded source of unit-interval samples. Samples are built from the raw
/// 64-bit engine output, so a seed yields the same sequence on every
/// standard library (std::uniform_real_distribution does not promise that).
class RandomStream {
 public:
  explicit RandomStream(std::uint64_t seed = kDefaultSeed) : engine_(seed) {}

  /// Uniform in [0, 1).
  double next_unit() { return static_cast<double>(engine_() >> 11) * 0x1.0p-53; }

  /// Independent stream for trial `index`; lets batches be split across
  /// workers without changing results.
  static RandomStream for_trial(std::uint64_t seed, std::uint64_t index) {
    std::seed_seq seq{static_cast<std::uint32_t>(seed), static_cast<std::uint32_t>(seed >> 32),
                      static_cast<std::uint32_t>(index), static_cast<std::uint32_t>(index >> 32)};
    std::mt19937_64 engine(seq);
    return RandomStream(engine());
  }

 private:
  std::mt19937_64 engine_;
};

}  // namespace bcst
