#pragma once

#include <cstdint>
#include <random>

namespace imf {

/// Deterministic PRNG used everywhere a seed is accepted.
///
/// The engine is std::mt19937_64, whose output sequence is fixed by the
/// standard. Only raw 64-bit draws are used; the library's distribution
/// templates are implementation-defined and are never used on a
/// reproducibility path.
class Rng {
 public:
  explicit Rng(std::uint64_t seed) : engine_(seed) {}

  std::uint64_t next() { return engine_(); }

  /// Uniform double in [0, 1) with 53 random bits.
  double uniform01() { return static_cast<double>(engine_() >> 11) * 0x1.0p-53; }

  /// Unbiased integer in [0, n). n must be positive.
  std::uint64_t below(std::uint64_t n) {
    const std::uint64_t limit = (~std::uint64_t{0}) - (~std::uint64_t{0}) % n;
    std::uint64_t v;
    do {
      v = engine_();
    } while (v >= limit);
    return v % n;
  }

  bool bit() { return (engine_() >> 63) != 0; }

 private:
  std::mt19937_64 engine_;
};

}  // namespace imf
