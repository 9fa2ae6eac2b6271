#pragma once

// Coefficient-space primitives: truncated coefficient vectors, Besov weight
// tables and weighted norms/inner products.

#include <cstddef>
#include <initializer_list>
#include <vector>

#include <Eigen/Dense>

#include "wmap/error.hpp"

namespace wmap {

using Vector = Eigen::VectorXd;
using Matrix = Eigen::MatrixXd;

/// Finite truncation (c_1, ..., c_N) of a coefficient sequence.
///
/// Entries are finite and N >= 1. Arithmetic between vectors of different
/// truncation throws DimensionMismatch; there is no implicit zero-padding
/// (use zeroExtended for that).
class CoeffVec {
 public:
  explicit CoeffVec(Vector entries);
  CoeffVec(std::initializer_list<double> entries);

  static CoeffVec zeros(std::size_t trunc);
  /// e_i with a one at 1-based position i.
  static CoeffVec basis(std::size_t i, std::size_t trunc);

  std::size_t trunc() const noexcept { return static_cast<std::size_t>(entries_.size()); }
  double operator[](std::size_t i) const { return entries_[static_cast<Eigen::Index>(i)]; }
  const Vector& values() const noexcept { return entries_; }
  std::vector<double> toStdVector() const;

  CoeffVec zeroExtended(std::size_t trunc) const;

  friend CoeffVec operator+(const CoeffVec& a, const CoeffVec& b);
  friend CoeffVec operator-(const CoeffVec& a, const CoeffVec& b);
  friend CoeffVec operator*(double s, const CoeffVec& a);
  friend CoeffVec operator-(const CoeffVec& a);

 private:
  Vector entries_;
};

void requireSameTrunc(std::size_t a, std::size_t b, const char* what);

/// Weight tables of the B^s_p scale for 1 < p <= 2, cached for one truncation.
///
///   w_l = l^{p(s/d + 1/2) - 1}   norm weight
///   a_l = l^{-s/d - 1/2 + 1/p}   sampling scale
///   c_l = l^{s/d + 1/2 - 1/p}    differentiability weight, c_l = 1 / a_l
class BesovWeights {
 public:
  BesovWeights(double s, double p, int d, std::size_t trunc);

  double s() const noexcept { return s_; }
  double p() const noexcept { return p_; }
  int d() const noexcept { return d_; }
  std::size_t trunc() const noexcept { return static_cast<std::size_t>(norm_.size()); }

  const Vector& norm() const noexcept { return norm_; }
  const Vector& scale() const noexcept { return scale_; }
  const Vector& differentiability() const noexcept { return diff_; }

 private:
  double s_;
  double p_;
  int d_;
  Vector norm_;
  Vector scale_;
  Vector diff_;
};

/// (sum_l w_l |u_l|^p)^{1/p}
double besovNorm(const CoeffVec& u, const BesovWeights& wts);

/// sum_l w_l |u_l|^p, the p-th power of besovNorm.
double besovNormPow(const Vector& u, const BesovWeights& wts);

/// sum_l weights_l u_l v_l
double weightedInner(const CoeffVec& u, const CoeffVec& v, const Vector& weights);

}  // namespace wmap
