#pragma once

#include <cstdint>
#include <random>

namespace cpa {

/// SplitMix64; conditions user seeds and derives per-task stream ids.
class SplitMix64 {
 public:
  explicit SplitMix64(std::uint64_t seed) : state_(seed) {}
  std::uint64_t next() {
    std::uint64_t z = (state_ += 0x9E3779B97F4A7C15ull);
    z = (z ^ (z >> 30)) * 0xBF58476D1CE4E5B9ull;
    z = (z ^ (z >> 27)) * 0x94D049BB133111EBull;
    return z ^ (z >> 31);
  }

 private:
  std::uint64_t state_;
};

/// Deterministic stream id for grid cell (a, b) under a user seed.
std::uint64_t derive_stream(std::uint64_t seed, std::uint64_t a,
                            std::uint64_t b);

/// mt19937_64 with explicit 53-bit uniforms. The engine's output sequence is
/// fixed by the standard; std::*_distribution is not, so all draws here are
/// hand-rolled to keep outputs platform-independent.
class Rng {
 public:
  explicit Rng(std::uint64_t seed) : engine_(SplitMix64(seed).next()) {}

  /// Uniform double in [0, 1).
  double uniform() {
    return static_cast<double>(engine_() >> 11) * 0x1.0p-53;
  }
  double uniform(double lo, double hi) { return lo + (hi - lo) * uniform(); }

  /// Standard normal via Box-Muller.
  double normal();

 private:
  std::mt19937_64 engine_;
  bool have_spare_ = false;
  double spare_ = 0;
};

}  // namespace cpa
