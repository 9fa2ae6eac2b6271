#include "wmap/rng.hpp"

#include <cmath>

#include "wmap/error.hpp"

namespace wmap {

std::uint64_t splitmix64(std::uint64_t x) {
  x += 0x9e3779b97f4a7c15ULL;
  x = (x ^ (x >> 30)) * 0xbf58476d1ce4e5b9ULL;
  x = (x ^ (x >> 27)) * 0x94d049bb133111ebULL;
  return x ^ (x >> 31);
}

std::uint64_t streamSeed(std::uint64_t seed, std::uint64_t index) {
  return splitmix64(splitmix64(seed) ^ splitmix64(index + 0x632be59bd9b4e019ULL));
}

Rng::Rng(std::uint64_t seed, std::uint64_t stream) : engine_(streamSeed(seed, stream)) {}

double Rng::uniform() {
  return static_cast<double>(engine_() >> 11) * 0x1.0p-53;
}

double Rng::uniformOpen() {
  double u = 0.0;
  do {
    u = uniform();
  } while (u == 0.0);
  return u;
}

double Rng::normal() {
  if (hasSpare_) {
    hasSpare_ = false;
    return spare_;
  }
  double x = 0.0;
  double y = 0.0;
  double r2 = 0.0;
  do {
    x = 2.0 * uniform() - 1.0;
    y = 2.0 * uniform() - 1.0;
    r2 = x * x + y * y;
  } while (r2 >= 1.0 || r2 == 0.0);
  const double f = std::sqrt(-2.0 * std::log(r2) / r2);
  spare_ = y * f;
  hasSpare_ = true;
  return x * f;
}

double Rng::gamma(double shape) {
  if (!(shape > 0.0) || !std::isfinite(shape)) fail(ErrorCode::InvalidArgument, "gamma shape must be positive");
  if (shape < 1.0) {
    const double g = gamma(shape + 1.0);
    return g * std::pow(uniformOpen(), 1.0 / shape);
  }
  const double d = shape - 1.0 / 3.0;
  const double c = 1.0 / std::sqrt(9.0 * d);
  for (;;) {
    double x = 0.0;
    double v = 0.0;
    do {
      x = normal();
      v = 1.0 + c * x;
    } while (v <= 0.0);
    v = v * v * v;
    const double u = uniformOpen();
    const double x2 = x * x;
    if (u < 1.0 - 0.0331 * x2 * x2) return d * v;
    if (std::log(u) < 0.5 * x2 + d * (1.0 - v + std::log(v))) return d * v;
  }
}

double Rng::generalizedGaussian(double p) {
  if (!(p > 0.0)) fail(ErrorCode::InvalidArgument, "generalized Gaussian needs p > 0");
  const double g = gamma(1.0 / p);
  const double mag = std::pow(g, 1.0 / p);
  return uniform() < 0.5 ? -mag : mag;
}

}  // namespace wmap
