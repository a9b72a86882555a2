#pragma once

#include <complex>
#include <cstdint>
#include <random>

namespace jrc {

/// SplitMix64 finalizer; used to derive independent stream seeds.
constexpr std::uint64_t mix64(std::uint64_t x) noexcept {
  x += 0x9e3779b97f4a7c15ULL;
  x = (x ^ (x >> 30)) * 0xbf58476d1ce4e5b9ULL;
  x = (x ^ (x >> 27)) * 0x94d049bb133111ebULL;
  return x ^ (x >> 31);
}

/// Seed for stream `stream` of `master`. Streams may be nested:
/// stream_seed(stream_seed(master, scenario), trial).
constexpr std::uint64_t stream_seed(std::uint64_t master, std::uint64_t stream) noexcept {
  return mix64(mix64(master) ^ mix64(stream + 0x5851f42d4c957f2dULL));
}

/// Per-call random source. Never shared between threads; every parallel task
/// builds its own from (master seed, stream id).
class Rng {
 public:
  explicit Rng(std::uint64_t seed) : engine_(seed) {}
  Rng(std::uint64_t master, std::uint64_t stream) : engine_(stream_seed(master, stream)) {}

  double uniform() { return std::uniform_real_distribution<double>(0.0, 1.0)(engine_); }
  double uniform(double lo, double hi) { return std::uniform_real_distribution<double>(lo, hi)(engine_); }
  double normal() { return std::normal_distribution<double>(0.0, 1.0)(engine_); }
  double normal(double mean, double stddev) { return mean + stddev * normal(); }
  /// Exponential with the given mean (not rate).
  double exponential(double mean) { return mean * std::exponential_distribution<double>(1.0)(engine_); }
  std::uint64_t poisson(double mean) {
    if (mean <= 0.0) return 0;
    return std::poisson_distribution<std::uint64_t>(mean)(engine_);
  }
  std::uint64_t uniform_index(std::uint64_t n) {
    return std::uniform_int_distribution<std::uint64_t>(0, n - 1)(engine_);
  }
  /// Circularly symmetric complex Gaussian with unit variance.
  std::complex<double> cn01() {
    constexpr double kInvSqrt2 = 0.70710678118654752440;
    const double re = normal();
    const double im = normal();
    return {kInvSqrt2 * re, kInvSqrt2 * im};
  }

  std::mt19937_64& engine() { return engine_; }

 private:
  std::mt19937_64 engine_;
};

}  // namespace jrc
