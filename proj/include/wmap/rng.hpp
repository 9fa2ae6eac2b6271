#pragma once

// Seeded random streams. Every stream is identified by (seed, stream index),
// so chunked or multi-threaded consumers reproduce the same numbers no matter
// how the work is scheduled.

#include <cstdint>
#include <random>

namespace wmap {

std::uint64_t splitmix64(std::uint64_t x);

/// Seed of stream `index` under master seed `seed`.
std::uint64_t streamSeed(std::uint64_t seed, std::uint64_t index);

class Rng {
 public:
  Rng(std::uint64_t seed, std::uint64_t stream);

  /// Uniform on [0, 1) with 53 random bits.
  double uniform();
  /// Uniform on (0, 1).
  double uniformOpen();
  double normal();
  /// Gamma(shape, 1) by Marsaglia--Tsang; shape < 1 is boosted through
  /// Gamma(shape + 1) * U^{1/shape}.
  double gamma(double shape);
  /// Density p / (2 Gamma(1/p)) exp(-|x|^p): |X| = G^{1/p}, G ~ Gamma(1/p), random sign.
  double generalizedGaussian(double p);

 private:
  std::mt19937_64 engine_;
  double spare_ = 0.0;
  bool hasSpare_ = false;
};

}  // namespace wmap
