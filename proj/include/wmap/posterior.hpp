#pragma once

// Posterior for m = A u + e with unit-variance i.i.d. Gaussian noise:
//   log pi(u | m) = -1/2 |A u - m|^2 + log pi_prior(u) + const.
// For the hierarchical prior A acts on the u-block of the joint state (u, t).

#include <cstddef>
#include <cstdint>
#include <optional>

#include "wmap/fomin.hpp"
#include "wmap/priors.hpp"
#include "wmap/samples.hpp"

namespace wmap {

class ForwardOperator {
 public:
  explicit ForwardOperator(Matrix matrix);

  std::size_t measurements() const noexcept { return static_cast<std::size_t>(matrix_.rows()); }
  std::size_t trunc() const noexcept { return static_cast<std::size_t>(matrix_.cols()); }
  const Matrix& matrix() const noexcept { return matrix_; }

 private:
  Matrix matrix_;
};

class PosteriorModel {
 public:
  PosteriorModel(PriorModel prior, ForwardOperator op, Vector data);

  /// Divides A and m by the noise standard deviation so the likelihood has unit variance.
  static PosteriorModel prewhitened(PriorModel prior, Matrix a, Vector data, double noiseStd);

  const PriorModel& prior() const noexcept { return prior_; }
  const ForwardOperator& op() const noexcept { return op_; }
  const Vector& data() const noexcept { return data_; }
  std::size_t dim() const noexcept { return prior_.dim(); }
  std::size_t trunc() const noexcept { return prior_.trunc(); }

  /// A u - m for the coefficient block of a joint state.
  Vector residual(const Vector& x) const;
  /// Zero-padded A h for a joint direction.
  Vector applyForward(const Vector& x) const;

  double logDensity(const CoeffVec& u) const;
  double logDensity(const HierState& x) const;
  double logDeriv(const CoeffVec& u, const CoeffVec& h) const;
  double logDeriv(const HierState& x, const HierDirection& d) const;

  double jointLogDensity(const Vector& x) const;
  double jointLogDeriv(const Vector& x, const Vector& h) const;

  /// F(x) = 1/2 |A u - m|^2 + J(x); log density = const - F.
  double objective(const Vector& x) const;
  /// Gradient of F, equal to -(beta_{e_i}(x))_i.
  Vector objectiveGradient(const Vector& x) const;

 private:
  void requireJoint(const Vector& x, const char* what) const;

  PriorModel prior_;
  ForwardOperator op_;
  Vector data_;
};

class PosteriorField final : public LogDensityField {
 public:
  explicit PosteriorField(PosteriorModel post) : post_(std::move(post)) {}

  std::size_t dim() const override { return post_.dim(); }
  double logDensity(const Vector& x) const override { return post_.jointLogDensity(x); }
  double logDeriv(const Vector& x, const Vector& h) const override { return post_.jointLogDeriv(x, h); }
  std::vector<double> breakpoints(const Vector& x, const Vector& h) const override {
    return post_.prior().segmentBreakpoints(x, h);
  }

 private:
  PosteriorModel post_;
};

/// Prior draws with log-weights -1/2 |A u - m|^2.
SampleBatch samplePosteriorIs(const PosteriorModel& post, std::uint64_t seed, std::size_t count,
                              unsigned threads = 1);

struct RwmOptions {
  double stepSize = 0.5;
  std::size_t burnIn = 1000;
  std::size_t thin = 1;
  std::optional<CoeffVec> start;  // defaults to the prior mode 0
};

/// Random-walk Metropolis with proposals x + stepSize * scale .* z, where scale is
/// the prior's per-coordinate sampling scale. Returns `count` post-burn-in states.
SampleBatch samplePosteriorRwm(const PosteriorModel& post, std::uint64_t seed, std::size_t count,
                               const RwmOptions& opts);

/// Weighted (or plain) sample mean of the draws.
CoeffVec cmEstimate(const SampleBatch& batch);
/// Coordinatewise standard errors of cmEstimate.
Vector cmStdErrors(const SampleBatch& batch);

struct SmallBallEstimate {
  double value = 0.0;
  double stdError = 0.0;
  bool noHits = false;
};

/// mu(B_eps(center)) with the Euclidean ball in coefficient space.
SmallBallEstimate smallBallProb(const PosteriorModel& post, const CoeffVec& center, double eps,
                                const SampleBatch& batch);

}  // namespace wmap
