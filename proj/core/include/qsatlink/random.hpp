#pragma once

#include <cmath>
#include <cstdint>

namespace qsatlink {

/// Counter-based splittable generator (splitmix64). Streams derived from the
/// same session seed with distinct stream ids are statistically independent,
/// which keeps per-slot simulation reproducible regardless of slot order.
class SplitMix64 {
public:
  using result_type = std::uint64_t;

  explicit SplitMix64(std::uint64_t seed) : state_(seed) {}

  static constexpr result_type min() { return 0; }
  static constexpr result_type max() { return ~std::uint64_t{0}; }

  result_type operator()() {
    std::uint64_t z = (state_ += 0x9E3779B97F4A7C15ull);
    z = (z ^ (z >> 30)) * 0xBF58476D1CE4E5B9ull;
    z = (z ^ (z >> 27)) * 0x94D049BB133111EBull;
    return z ^ (z >> 31);
  }

private:
  std::uint64_t state_;
};

inline std::uint64_t mix64(std::uint64_t z) {
  z = (z ^ (z >> 30)) * 0xBF58476D1CE4E5B9ull;
  z = (z ^ (z >> 27)) * 0x94D049BB133111EBull;
  return z ^ (z >> 31);
}

/// Derives an independent stream seed from (seed, stream, substream).
inline std::uint64_t derive_stream(std::uint64_t seed, std::uint64_t stream,
                                   std::uint64_t substream = 0) {
  std::uint64_t h = mix64(seed + 0x9E3779B97F4A7C15ull);
  h = mix64(h ^ (stream + 0xBF58476D1CE4E5B9ull));
  h = mix64(h ^ (substream + 0x94D049BB133111EBull));
  return h;
}

/// Sampling front end over SplitMix64. All samplers are implemented here
/// rather than through <random> distributions so that identical seeds give
/// identical event streams on every platform and standard library.
class Rng {
public:
  explicit Rng(std::uint64_t stream_seed) : gen_(stream_seed) {}

  /// Uniform in [0, 1) with 53 random bits.
  double uniform() { return static_cast<double>(gen_() >> 11) * 0x1.0p-53; }

  /// Uniform in (0, 1); never returns an endpoint.
  double uniform_pos() {
    return (static_cast<double>(gen_() >> 11) + 0.5) * 0x1.0p-53;
  }

  bool bernoulli(double p) { return uniform() < p; }

  /// Box-Muller transform; consumes exactly two uniforms per call.
  double gaussian(double sigma) {
    double u1 = uniform_pos();
    double u2 = uniform();
    return sigma * std::sqrt(-2.0 * std::log(u1)) *
           std::cos(6.283185307179586476925286766559 * u2);
  }

  double exponential(double mean) { return -mean * std::log(uniform_pos()); }

  std::uint64_t poisson(double lambda) {
    if (lambda <= 0.0) return 0;
    if (lambda < 64.0) {
      // Direct product-of-uniforms method.
      std::uint64_t k = 0;
      double p = 1.0;
      const double limit = std::exp(-lambda);
      for (;;) {
        p *= uniform_pos();
        if (p <= limit) return k;
        ++k;
      }
    }
    // Gaussian approximation rounded to the nearest non-negative integer.
    double x = lambda + std::sqrt(lambda) * gaussian(1.0);
    return x <= 0.0 ? 0 : static_cast<std::uint64_t>(x + 0.5);
  }

  /// Poisson(lambda) conditioned on the result being >= 1.
  std::uint64_t poisson_positive(double lambda) {
    if (lambda >= 64.0) {
      std::uint64_t k = poisson(lambda);
      return k == 0 ? 1 : k;
    }
    // Inverse CDF walk over the zero-truncated pmf.
    const double total = -std::expm1(-lambda);  // 1 - e^-lambda
    double target = uniform() * total;
    double pmf = lambda * std::exp(-lambda);  // pmf at k = 1
    std::uint64_t k = 1;
    double cum = pmf;
    while (cum < target && k < 1000) {
      ++k;
      pmf *= lambda / static_cast<double>(k);
      cum += pmf;
    }
    return k;
  }

  /// Number of consecutive failures before the next success when each trial
  /// succeeds with probability p. Used to jump over non-detecting pulses.
  std::uint64_t geometric_failures(double p) {
    if (p >= 1.0) return 0;
    if (p <= 0.0) return ~std::uint64_t{0};
    double g = std::floor(std::log(uniform_pos()) / std::log1p(-p));
    if (g >= 9.0e18) return ~std::uint64_t{0};
    return static_cast<std::uint64_t>(g);
  }

private:
  SplitMix64 gen_;
};

}  // namespace qsatlink
