#pragma once

#include <cstddef>
#include <functional>
#include <vector>

namespace wmap {

/// n-point Gauss--Legendre rule on [-1, 1].
class GaussLegendreRule {
 public:
  explicit GaussLegendreRule(std::size_t n);

  std::size_t size() const noexcept { return nodes_.size(); }
  const std::vector<double>& nodes() const noexcept { return nodes_; }
  const std::vector<double>& weights() const noexcept { return weights_; }

  /// Integral of f over [a, b].
  double integrate(const std::function<double(double)>& f, double a, double b) const;

  /// Integral of f over [a, b] after the substitution s = a + (b - a) t^3 (10 - 15 t + 6 t^2),
  /// which flattens algebraic endpoint singularities such as |s - a|^{p-1}.
  double integrateGraded(const std::function<double(double)>& f, double a, double b) const;

 private:
  std::vector<double> nodes_;
  std::vector<double> weights_;
};

/// Rule for n nodes, built once per n and shared afterwards.
const GaussLegendreRule& gaussLegendre(std::size_t n);

/// Adaptive double-exponential quadrature of f over [0, inf).
double integrateHalfLine(const std::function<double(double)>& f, double relTol = 1e-13);

}  // namespace wmap
