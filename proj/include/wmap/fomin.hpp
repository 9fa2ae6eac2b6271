#pragma once

// Translation densities and first-order optimality checks.
//
// Convention: r_h(u) is the density of the translated measure at u relative to
// the original one, i.e. the small-ball ratio mu(B_eps(u - h)) / mu(B_eps(u))
// as eps -> 0. At finite truncation it equals pi(u - h) / pi(u), and along the
// segment s -> u - s h
//
//   log r_h(u) = -int_0^1 beta_h(u - s h) ds.
//
// r_h(u) <= 1 for every h characterises a maximiser of a log-concave density.

#include <cstddef>
#include <span>
#include <vector>

#include "wmap/priors.hpp"
#include "wmap/seqspace.hpp"

namespace wmap {

/// A fixed measure seen through its finite-dimensional log-density and
/// logarithmic derivative. log_deriv must be linear in h.
class LogDensityField {
 public:
  virtual ~LogDensityField() = default;
  virtual std::size_t dim() const = 0;
  virtual double logDensity(const Vector& x) const = 0;
  virtual double logDeriv(const Vector& x, const Vector& h) const = 0;
  /// Points s in (0, 1) where s -> logDeriv(x - s h, h) is not smooth.
  virtual std::vector<double> breakpoints(const Vector&, const Vector&) const { return {}; }
};

class PriorField final : public LogDensityField {
 public:
  explicit PriorField(PriorModel prior) : prior_(std::move(prior)) {}

  std::size_t dim() const override { return prior_.dim(); }
  double logDensity(const Vector& x) const override { return prior_.jointLogDensity(x); }
  double logDeriv(const Vector& x, const Vector& h) const override { return prior_.jointLogDeriv(x, h); }
  std::vector<double> breakpoints(const Vector& x, const Vector& h) const override {
    return prior_.segmentBreakpoints(x, h);
  }

 private:
  PriorModel prior_;
};

inline constexpr std::size_t kDefaultOmNodes = 64;

/// exp(-int_0^1 beta_h(u - s h) ds) by Gauss--Legendre quadrature with `nodes`
/// points on each smooth piece of the segment (graded near the field's breakpoints).
double omRatioQuadrature(const LogDensityField& field, const CoeffVec& u, const CoeffVec& h,
                         std::size_t nodes = kDefaultOmNodes);

/// exp(log pi(u - h) - log pi(u)); the independent oracle for omRatioQuadrature.
double omRatioExact(const LogDensityField& field, const CoeffVec& u, const CoeffVec& h);

/// max_i |beta_{e_i}(u)| over the coordinate directions of the state space.
double optimalityResidual(const LogDensityField& field, const CoeffVec& u);

/// r_h(u) for each direction; a wMAP candidate has every value <= 1.
std::vector<double> wmapInequalityScan(const LogDensityField& field, const CoeffVec& u,
                                       std::span<const CoeffVec> directions);

}  // namespace wmap
