#pragma once

#include <cmath>
#include <cstdint>
#include <random>
#include <vector>

namespace trajcast {

// Deterministic random source. mt19937_64 has a standard-mandated output
// sequence, and all derived draws below use only integer/bit arithmetic or
// explicitly chosen float operations, so streams replay identically across
// platforms and standard-library implementations.
class Rng {
 public:
  explicit Rng(std::uint64_t seed) : engine_(seed) {}

  std::uint64_t next_u64() { return engine_(); }

  // Uniform in [0, 1) with 53 bits of randomness.
  double uniform() {
    return static_cast<double>(next_u64() >> 11) * 0x1.0p-53;
  }

  double uniform(double lo, double hi) { return lo + (hi - lo) * uniform(); }

  // Unbiased index in [0, n) via rejection sampling.
  std::size_t uniform_index(std::size_t n) {
    const std::uint64_t bound = static_cast<std::uint64_t>(n);
    const std::uint64_t limit = UINT64_MAX - UINT64_MAX % bound;
    std::uint64_t x;
    do {
      x = next_u64();
    } while (x >= limit);
    return static_cast<std::size_t>(x % bound);
  }

  // Standard normal; Box-Muller without a cached spare so the draw count
  // per call is fixed.
  double normal() {
    const double u1 = uniform();
    const double u2 = uniform();
    const double r = std::sqrt(-2.0 * std::log1p(-u1));
    return r * std::cos(6.283185307179586476925286766559 * u2);
  }

  // Normal(0, sigma) resampled until within [-2 sigma, 2 sigma].
  double trunc_normal(double sigma) {
    double x;
    do {
      x = normal() * sigma;
    } while (std::abs(x) > 2.0 * sigma);
    return x;
  }

  // Near-normal step from the sum of 12 uniforms. Integer/add/mul only, so
  // generated datasets are bit-stable across libm versions.
  double portable_normal() {
    double s = 0.0;
    for (int i = 0; i < 12; ++i) s += uniform();
    return s - 6.0;
  }

  template <typename T>
  void shuffle(std::vector<T>& v) {
    for (std::size_t i = v.size(); i > 1; --i) {
      std::swap(v[i - 1], v[uniform_index(i)]);
    }
  }

 private:
  std::mt19937_64 engine_;
};

}  // namespace trajcast
