#pragma once

#include <array>
#include <cmath>
#include <cstdint>
#include <limits>

namespace refplan {

inline std::uint64_t splitmix64(std::uint64_t& x) {
  x += 0x9e3779b97f4a7c15ull;
  std::uint64_t z = x;
  z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ull;
  z = (z ^ (z >> 27)) * 0x94d049bb133111ebull;
  return z ^ (z >> 31);
}

// FNV-1a over arbitrary integer words. Used for observation keys and seed
// derivation so results do not depend on std::hash.
inline std::uint64_t fnv1a_init() { return 0xcbf29ce484222325ull; }

inline std::uint64_t fnv1a_mix(std::uint64_t h, std::uint64_t word) {
  for (int i = 0; i < 8; ++i) {
    h ^= (word >> (8 * i)) & 0xffull;
    h *= 0x100000001b3ull;
  }
  return h;
}

// xoshiro256** with hand-rolled distributions. std::mt19937_64 would work,
// but the standard distributions are implementation-defined, and the tests
// freeze expected values.
class Rng {
 public:
  explicit Rng(std::uint64_t seed) {
    std::uint64_t sm = seed;
    for (auto& word : state_) word = splitmix64(sm);
  }

  std::uint64_t next_u64() {
    auto rotl = [](std::uint64_t v, int k) { return (v << k) | (v >> (64 - k)); };
    const std::uint64_t result = rotl(state_[1] * 5, 7) * 9;
    const std::uint64_t t = state_[1] << 17;
    state_[2] ^= state_[0];
    state_[3] ^= state_[1];
    state_[1] ^= state_[2];
    state_[0] ^= state_[3];
    state_[2] ^= t;
    state_[3] = rotl(state_[3], 45);
    return result;
  }

  // Uniform in [0, 1).
  double uniform01() { return static_cast<double>(next_u64() >> 11) * 0x1.0p-53; }

  double uniform(double lo, double hi) { return lo + (hi - lo) * uniform01(); }

  // Uniform integer in [0, n). n must be positive.
  int uniform_int(int n) { return static_cast<int>(uniform01() * n); }

  bool bernoulli(double p) { return uniform01() < p; }

  // Box-Muller; one normal per call keeps draw sequences easy to reason about.
  double normal(double mean = 0.0, double stddev = 1.0) {
    double u1 = uniform01();
    while (u1 <= 0.0) u1 = uniform01();
    const double u2 = uniform01();
    const double z = std::sqrt(-2.0 * std::log(u1)) * std::cos(6.283185307179586477 * u2);
    return mean + stddev * z;
  }

  // Independent child stream (worker/episode derivation).
  Rng fork(std::uint64_t stream) {
    std::uint64_t h = fnv1a_init();
    h = fnv1a_mix(h, next_u64());
    h = fnv1a_mix(h, stream);
    return Rng(h);
  }

 private:
  std::array<std::uint64_t, 4> state_{};
};

// Deterministic seed for one episode of one benchmark cell.
inline std::uint64_t derive_seed(std::uint64_t master, std::uint64_t cell, std::uint64_t episode) {
  std::uint64_t h = fnv1a_init();
  h = fnv1a_mix(h, master);
  h = fnv1a_mix(h, cell);
  h = fnv1a_mix(h, episode);
  return h;
}

}  // namespace refplan
