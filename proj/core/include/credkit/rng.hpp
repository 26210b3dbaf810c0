#pragma once

#include <cmath>
#include <cstdint>

namespace credkit {

namespace detail {
inline std::uint64_t splitmix64(std::uint64_t x) {
  x += 0x9e3779b97f4a7c15ULL;
  x = (x ^ (x >> 30)) * 0xbf58476d1ce4e5b9ULL;
  x = (x ^ (x >> 27)) * 0x94d049bb133111ebULL;
  return x ^ (x >> 31);
}
}  // namespace detail

// Derives an independent stream key from a root seed and a purpose tag, so
// every consumer of randomness (init, batching, split search, ...) replays
// identically no matter what the others draw.
inline std::uint64_t derive_stream(std::uint64_t seed, std::uint64_t tag) {
  return detail::splitmix64(seed ^ detail::splitmix64(tag ^ 0xa5a5a5a5a5a5a5a5ULL));
}

inline std::uint64_t derive_stream(std::uint64_t seed, std::uint64_t tag_a, std::uint64_t tag_b) {
  return derive_stream(derive_stream(seed, tag_a), tag_b);
}

// Counter-based generator: output i depends only on (key, i). Cheap to fork,
// trivially reproducible, no shared state.
class Rng {
 public:
  explicit Rng(std::uint64_t key) : key_(key), counter_(0) {}
  Rng(std::uint64_t seed, std::uint64_t tag) : Rng(derive_stream(seed, tag)) {}
  Rng(std::uint64_t seed, std::uint64_t tag_a, std::uint64_t tag_b)
      : Rng(derive_stream(seed, tag_a, tag_b)) {}

  std::uint64_t next_u64() { return detail::splitmix64(key_ + 0x632be59bd9b4e019ULL * ++counter_); }

  // Uniform in [0, 1).
  double next_double() { return static_cast<double>(next_u64() >> 11) * 0x1.0p-53; }

  // Uniform in {0, ..., n-1}; n must be positive.
  std::uint64_t next_below(std::uint64_t n) {
    // Rejection sampling keeps the draw unbiased.
    const std::uint64_t limit = UINT64_MAX - UINT64_MAX % n;
    std::uint64_t v = next_u64();
    while (v >= limit) v = next_u64();
    return v % n;
  }

  // Standard normal via Box-Muller; uses two uniforms per draw, no cached
  // spare, so output i is a pure function of the counter position.
  double next_normal() {
    double u1 = next_double();
    double u2 = next_double();
    while (u1 <= 0.0) u1 = next_double();
    return std::sqrt(-2.0 * std::log(u1)) * std::cos(6.283185307179586476925286766559 * u2);
  }

  bool next_bernoulli(double p) { return next_double() < p; }

 private:
  std::uint64_t key_;
  std::uint64_t counter_;
};

}  // namespace credkit
