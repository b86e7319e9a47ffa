#pragma once

#include <cmath>
#include <cstdint>
#include <utility>
#include <vector>

namespace liftpm {

// splitmix64 step: a bijective hash of an incrementing counter.
inline std::uint64_t mix64(std::uint64_t z) {
  z = (z ^ (z >> 30)) * 0xBF58476D1CE4E5B9ull;
  z = (z ^ (z >> 27)) * 0x94D049BB133111EBull;
  return z ^ (z >> 31);
}

struct SplitMix64 {
  std::uint64_t state = 0;
  std::uint64_t next() {
    state += 0x9E3779B97F4A7C15ull;
    return mix64(state);
  }
};

// Counter-based stream keyed by (seed, a, b, c). Distinct keys give
// independent streams; a given key always replays the same sequence.
class KeyedStream {
 public:
  explicit KeyedStream(std::uint64_t seed, std::uint64_t a = 0, std::uint64_t b = 0,
                       std::uint64_t c = 0) {
    std::uint64_t s = mix64(seed + 0x9E3779B97F4A7C15ull);
    s = mix64(s ^ (a + 0xBF58476D1CE4E5B9ull));
    s = mix64(s ^ (b + 0x94D049BB133111EBull));
    s = mix64(s ^ (c + 0xD6E8FEB86659FD93ull));
    gen_.state = s;
  }

  std::uint64_t next_u64() { return gen_.next(); }

  // Unbiased draw in [0, bound), bound >= 1.
  std::uint64_t below(std::uint64_t bound) {
    const std::uint64_t threshold = (-bound) % bound;
    for (;;) {
      const std::uint64_t r = gen_.next();
      if (r >= threshold) return r % bound;
    }
  }

  // Uniform in [0, 1).
  double next_unit() { return static_cast<double>(next_u64() >> 11) * 0x1.0p-53; }

  // Uniform in (lo, hi).
  double next_in(double lo, double hi) { return lo + (hi - lo) * next_unit(); }

  // Fisher-Yates.
  template <typename T>
  void shuffle(std::vector<T>& v) {
    for (std::size_t i = v.size(); i > 1; --i) std::swap(v[i - 1], v[below(i)]);
  }

 private:
  SplitMix64 gen_;
};

// Poisson draw: inversion by sequential search below mean 30, transformed
// rejection (Hormann's PTRS) above it.
inline long poisson_draw(KeyedStream& rng, double lambda) {
  if (lambda <= 0.0) return 0;
  if (lambda < 30.0) {
    const double u = rng.next_unit();
    double p = std::exp(-lambda);
    double cum = p;
    long k = 0;
    while (u >= cum && k < 4096) {
      ++k;
      p *= lambda / static_cast<double>(k);
      cum += p;
    }
    return k;
  }
  const double b = 0.931 + 2.53 * std::sqrt(lambda);
  const double a = -0.059 + 0.02483 * b;
  const double inv_alpha = 1.1239 + 1.1328 / (b - 3.4);
  const double v_r = 0.9277 - 3.6224 / (b - 2.0);
  const double log_lambda = std::log(lambda);
  for (;;) {
    const double u = rng.next_unit() - 0.5;
    const double v = rng.next_unit();
    const double us = 0.5 - std::abs(u);
    const double kf = std::floor((2.0 * a / us + b) * u + lambda + 0.43);
    if (us >= 0.07 && v <= v_r) return static_cast<long>(kf);
    if (kf < 0 || (us < 0.013 && v > us)) continue;
    const double k = kf;
    if (std::log(v * inv_alpha / (a / (us * us) + b)) <=
        k * log_lambda - lambda - std::lgamma(k + 1.0))
      return static_cast<long>(kf);
  }
}

}  // namespace liftpm
