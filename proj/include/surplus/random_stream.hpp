#pragma once

#include <cmath>
#include <cstdint>
#include <string_view>

namespace surplus {

namespace detail {

// splitmix64 output scramble (Vigna). One invertible mixing round.
inline std::uint64_t mix64(std::uint64_t z) {
  z = (z ^ (z >> 30)) * 0xBF58476D1CE4E5B9ULL;
  z = (z ^ (z >> 27)) * 0x94D049BB133111EBULL;
  return z ^ (z >> 31);
}

inline std::uint64_t fnv1a64(std::string_view s) {
  std::uint64_t h = 0xCBF29CE484222325ULL;
  for (unsigned char c : s) {
    h ^= c;
    h *= 0x100000001B3ULL;
  }
  return h;
}

}  // namespace detail

/// Deterministic pseudo-random stream (splitmix64). Streams derived from a
/// master seed with distinct (purpose, index) pairs are statistically
/// independent and reproducible across runs, so Monte Carlo trials can run in
/// parallel without sharing generator state.
///
/// Splitting rule: sub_seed = mix(mix(master ^ fnv1a(purpose)) + index).
class RandomStream {
 public:
  explicit RandomStream(std::uint64_t seed) : state_(seed) {}

  static RandomStream derive(std::uint64_t master, std::string_view purpose,
                             std::uint64_t index = 0) {
    const std::uint64_t tagged = detail::mix64(master ^ detail::fnv1a64(purpose));
    return RandomStream(detail::mix64(tagged + index));
  }

  std::uint64_t next_u64() {
    state_ += 0x9E3779B97F4A7C15ULL;
    return detail::mix64(state_);
  }

  /// Uniform double in [0, 1).
  double next_double() { return static_cast<double>(next_u64() >> 11) * 0x1.0p-53; }

  /// Uniform double in [lo, hi).
  double next_range(double lo, double hi) { return lo + (hi - lo) * next_double(); }

  /// Standard normal via the Marsaglia polar method.
  double next_normal() {
    if (have_cached_) {
      have_cached_ = false;
      return cached_;
    }
    double u, v, q;
    do {
      u = 2.0 * next_double() - 1.0;
      v = 2.0 * next_double() - 1.0;
      q = u * u + v * v;
    } while (q >= 1.0 || q == 0.0);
    const double f = std::sqrt(-2.0 * std::log(q) / q);
    cached_ = v * f;
    have_cached_ = true;
    return u * f;
  }

  /// Uniform integer in {0, ..., n-1}, rejection-sampled to avoid modulo bias.
  int next_index(int n) {
    const std::uint64_t span = static_cast<std::uint64_t>(n);
    const std::uint64_t limit = UINT64_MAX - UINT64_MAX % span;
    std::uint64_t v = next_u64();
    while (v >= limit) v = next_u64();
    return static_cast<int>(v % span);
  }

  bool next_bernoulli(double p) { return next_double() < p; }

 private:
  std::uint64_t state_;
  bool have_cached_ = false;
  double cached_ = 0.0;
};

}  // namespace surplus
