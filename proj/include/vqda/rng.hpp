#pragma once

#include <cmath>
#include <cstdint>
#include <numbers>
#include <vector>

namespace vqda {

// SplitMix64 in counter mode. Every result-bearing random draw in the
// library goes through this generator: outputs depend only on (seed, draw
// index), so runs reproduce bit-for-bit across platforms and thread counts.
// std::mt19937 / std::uniform_real_distribution are deliberately not used
// anywhere (distribution output is implementation-defined).
class SplitMix64 {
 public:
  explicit SplitMix64(std::uint64_t seed) : state_(seed) {}

  std::uint64_t next_u64() {
    std::uint64_t z = (state_ += 0x9E3779B97F4A7C15ull);
    z = (z ^ (z >> 30)) * 0xBF58476D1CE4E5B9ull;
    z = (z ^ (z >> 27)) * 0x94D049BB133111EBull;
    return z ^ (z >> 31);
  }

  // Uniform double in [0, 1) with 53 random mantissa bits.
  double uniform() { return static_cast<double>(next_u64() >> 11) * 0x1.0p-53; }

  // Uniform double in [lo, hi).
  double uniform(double lo, double hi) { return lo + (hi - lo) * uniform(); }

  // Uniform angle in [0, 2*pi).
  double angle() { return uniform(0.0, 2.0 * std::numbers::pi); }

  // Uniform integer in [0, n), Lemire multiply-shift.
  std::uint64_t bounded(std::uint64_t n) {
    return static_cast<std::uint64_t>(
        (static_cast<unsigned __int128>(next_u64()) * n) >> 64);
  }

  // Standard normal via Box-Muller (always consumes two uniforms).
  double gaussian() {
    double u1 = uniform();
    double u2 = uniform();
    while (u1 <= 0.0) u1 = uniform();
    return std::sqrt(-2.0 * std::log(u1)) *
           std::cos(2.0 * std::numbers::pi * u2);
  }

  // Independent substream; mixes the id through one extra SplitMix64 round.
  SplitMix64 fork(std::uint64_t stream_id) const {
    SplitMix64 mixer(state_ ^ (0xA0761D6478BD642Full * (stream_id + 1)));
    return SplitMix64(mixer.next_u64());
  }

  // Deterministic Fisher-Yates shuffle of {0, 1, ..., n-1}.
  std::vector<std::size_t> permutation(std::size_t n) {
    std::vector<std::size_t> p(n);
    for (std::size_t i = 0; i < n; ++i) p[i] = i;
    for (std::size_t i = n; i > 1; --i) {
      std::size_t j = static_cast<std::size_t>(bounded(i));
      std::swap(p[i - 1], p[j]);
    }
    return p;
  }

 private:
  std::uint64_t state_;
};

}  // namespace vqda
