#pragma once

#include <cmath>
#include <cstdint>
#include <random>
#include <string_view>

#include "tabletop/common/angles.hpp"

namespace tabletop {

// splitmix64 step, used both for seed derivation and for hashing strings
// into stream ids.
inline std::uint64_t mix64(std::uint64_t x) {
  x += 0x9e3779b97f4a7c15ull;
  x = (x ^ (x >> 30)) * 0xbf58476d1ce4e5b9ull;
  x = (x ^ (x >> 27)) * 0x94d049bb133111ebull;
  return x ^ (x >> 31);
}

inline std::uint64_t hash_str(std::string_view s) {
  std::uint64_t h = 0xcbf29ce484222325ull;  // FNV-1a
  for (unsigned char c : s) {
    h ^= c;
    h *= 0x100000001b3ull;
  }
  return h;
}

inline std::uint64_t derive_seed(std::uint64_t base, std::uint64_t stream) {
  return mix64(base ^ mix64(stream));
}

inline std::uint64_t derive_seed(std::uint64_t base, std::string_view stream) {
  return derive_seed(base, hash_str(stream));
}

// Deterministic RNG wrapper. Distribution shaping is done by hand (not via
// std::uniform_real_distribution etc.) so that the draw sequence is identical
// across standard library implementations.
class Rng {
 public:
  explicit Rng(std::uint64_t seed) : engine_(seed) {}

  std::uint64_t next_u64() { return engine_(); }

  // [0, 1)
  double uniform() {
    return (next_u64() >> 11) * (1.0 / 9007199254740992.0);  // 53-bit mantissa
  }

  double uniform(double lo, double hi) { return lo + (hi - lo) * uniform(); }

  // inclusive range, rejection sampled to avoid modulo bias
  int uniform_int(int lo, int hi) {
    const std::uint64_t span = static_cast<std::uint64_t>(hi - lo) + 1;
    const std::uint64_t limit = (~0ull / span) * span;
    std::uint64_t draw;
    do {
      draw = next_u64();
    } while (draw >= limit);
    return lo + static_cast<int>(draw % span);
  }

  // Box-Muller, cosine branch only: two draws per sample, fully portable.
  double normal(double mean = 0.0, double stddev = 1.0) {
    const double u1 = 1.0 - uniform();  // (0, 1]
    const double u2 = uniform();
    const double z = std::sqrt(-2.0 * std::log(u1)) * std::cos(2.0 * kPi * u2);
    return mean + stddev * z;
  }

  Rng fork(std::string_view stream) const {
    return Rng(derive_seed(seed_of(engine_), stream));
  }

 private:
  static std::uint64_t seed_of(const std::mt19937_64& e) {
    // engines are copyable; sampling one value from a copy gives a stable
    // stream id without disturbing the parent
    std::mt19937_64 copy = e;
    return copy();
  }

  std::mt19937_64 engine_;
};

}  // namespace tabletop
