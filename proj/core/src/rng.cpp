#include "cpa/rng.hpp"

#include <cmath>

namespace cpa {

std::uint64_t derive_stream(std::uint64_t seed, std::uint64_t a,
                            std::uint64_t b) {
  SplitMix64 g(seed);
  const std::uint64_t s0 = g.next();
  SplitMix64 ga(s0 ^ (a * 0xA24BAED4963EE407ull + 1));
  const std::uint64_t s1 = ga.next();
  SplitMix64 gb(s1 ^ (b * 0x9FB21C651E98DF25ull + 1));
  return gb.next();
}

double Rng::normal() {
  if (have_spare_) {
    have_spare_ = false;
    return spare_;
  }
  double u1 = uniform();
  while (u1 <= 0) u1 = uniform();
  const double u2 = uniform();
  const double mag = std::sqrt(-2.0 * std::log(u1));
  spare_ = mag * std::sin(6.283185307179586 * u2);
  have_spare_ = true;
  return mag * std::cos(6.283185307179586 * u2);
}

}  // namespace cpa
