#pragma once

// Prior families on the truncated coefficient space: Gaussian with diagonal
// Cameron--Martin weights, Besov B^s_p product priors and the hierarchical
// Gaussian prior with an unknown mean amplitude t.
//
// Every family carries a convex functional J with log-density = const - J, so
// the logarithmic derivative is beta_h(x) = -J'(x)h. All three operations share
// the same per-family kernel.

#include <cstddef>
#include <cstdint>
#include <variant>
#include <vector>

#include "wmap/samples.hpp"
#include "wmap/seqspace.hpp"

namespace wmap {

enum class PriorFamily { GaussianDiag, Besov, Hierarchical };

const char* toString(PriorFamily family);

struct GaussianDiagPrior {
  Vector cmWeights;  // q_l; J(u) = 1/2 sum q_l u_l^2
};

struct BesovPrior {
  BesovWeights wts;
};

struct HierarchicalPrior {
  Vector covWeights;  // Cameron--Martin weights of the centred Gaussian nu
  Vector mean;        // direction e
  double rhoVariance;
};

/// Point (u, t) of the hierarchical state space.
struct HierState {
  CoeffVec u;
  double t;

  /// (u_1, ..., u_N, t)
  CoeffVec joint() const;
  static HierState fromJoint(const CoeffVec& x);
};

/// Direction (h, tau) in the hierarchical state space.
struct HierDirection {
  CoeffVec h;
  double tau;

  CoeffVec joint() const;
};

class PriorModel {
 public:
  static PriorModel gaussianDiag(Vector cmWeights);
  static PriorModel whiteNoise(std::size_t trunc);
  static PriorModel besov(double s, double p, int d, std::size_t trunc);
  static PriorModel hierarchical(Vector covWeights, Vector mean, double rhoVariance);

  PriorFamily family() const noexcept;
  std::size_t trunc() const noexcept { return trunc_; }
  /// Length of a state vector: trunc, plus one for the hierarchical t.
  std::size_t dim() const noexcept;

  const GaussianDiagPrior* gaussian() const { return std::get_if<GaussianDiagPrior>(&params_); }
  const BesovPrior* besovParams() const { return std::get_if<BesovPrior>(&params_); }
  const HierarchicalPrior* hierarchicalParams() const { return std::get_if<HierarchicalPrior>(&params_); }

  // Typed entry points. Hierarchical models accept only HierState/HierDirection,
  // the other families only CoeffVec.
  double logDensity(const CoeffVec& u) const;
  double logDensity(const HierState& x) const;
  double logDeriv(const CoeffVec& u, const CoeffVec& h) const;
  double logDeriv(const HierState& x, const HierDirection& d) const;
  double J(const CoeffVec& u) const;
  double J(const HierState& x) const;
  double JGradDir(const CoeffVec& u, const CoeffVec& h) const;
  double JGradDir(const HierState& x, const HierDirection& d) const;

  // Joint state-space kernel (vectors of length dim()).
  double jointLogDensity(const Vector& x) const;
  double jointJ(const Vector& x) const;
  double jointJGradDir(const Vector& x, const Vector& h) const;
  double jointLogDeriv(const Vector& x, const Vector& h) const { return -jointJGradDir(x, h); }
  Vector jointJGradient(const Vector& x) const;
  /// s in (0, 1) where a coordinate of x - s h crosses zero; there the Besov
  /// derivative |x|^{p-1} is not smooth. Empty for the Gaussian families.
  std::vector<double> segmentBreakpoints(const Vector& x, const Vector& h) const;

  /// Log of the normalization: log density = logNormalizer() - J.
  double logNormalizer() const noexcept { return logNorm_; }

  /// Per-coordinate spread of the prior, used to scale random-walk proposals.
  Vector samplingScale() const;

  /// True when J is a sum of one-dimensional terms (Gaussian, Besov).
  bool separable() const noexcept;
  /// argmin_x 1/2 |x - y|^2 + tau J(x); separable families only.
  Vector prox(const Vector& y, double tau) const;

  SampleBatch sample(std::uint64_t seed, std::size_t count, unsigned threads = 1) const;

 private:
  using Params = std::variant<GaussianDiagPrior, BesovPrior, HierarchicalPrior>;
  PriorModel(Params params, std::size_t trunc);

  void requireJoint(const Vector& x, const char* what) const;
  void requireFlat(const char* what) const;
  void requireHierarchical(const char* what) const;

  Params params_;
  std::size_t trunc_;
  double logNorm_ = 0.0;
};

/// sigma_p = (int exp(-|x|^p) dx)^{-1} = p / (2 Gamma(1/p)).
double besovNormalizer(double p);

/// Fisher information of sigma_p exp(-|x|^p), 1 < p <= 2, by adaptive
/// quadrature of p^2 int |t|^{2(p-1)} sigma_p exp(-|t|^p) dt.
double fisherInformation(double p);

}  // namespace wmap
