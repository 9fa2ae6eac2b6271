#include "wmap/fomin.hpp"

#include <algorithm>
#include <cmath>

#include "wmap/quadrature.hpp"

namespace wmap {

namespace {

void requireField(const LogDensityField& field, const CoeffVec& v, const char* what) {
  requireSameTrunc(v.trunc(), field.dim(), what);
}

}  // namespace

double omRatioQuadrature(const LogDensityField& field, const CoeffVec& u, const CoeffVec& h,
                         std::size_t nodes) {
  requireField(field, u, "om_ratio_quadrature");
  requireField(field, h, "om_ratio_quadrature");
  if (nodes < 2) fail(ErrorCode::InvalidArgument, "quadrature needs at least 2 nodes");
  if (h.values().isZero(0.0)) return 1.0;
  const Vector& x = u.values();
  const Vector& dir = h.values();
  const auto& rule = gaussLegendre(nodes);
  const auto beta = [&](double s) { return field.logDeriv(x - s * dir, dir); };
  std::vector<double> cuts = field.breakpoints(x, dir);
  if (cuts.empty()) return std::exp(-rule.integrate(beta, 0.0, 1.0));
  cuts.push_back(0.0);
  cuts.push_back(1.0);
  std::sort(cuts.begin(), cuts.end());
  cuts.erase(std::unique(cuts.begin(), cuts.end()), cuts.end());
  double integral = 0.0;
  for (std::size_t k = 0; k + 1 < cuts.size(); ++k) integral += rule.integrateGraded(beta, cuts[k], cuts[k + 1]);
  return std::exp(-integral);
}

double omRatioExact(const LogDensityField& field, const CoeffVec& u, const CoeffVec& h) {
  requireField(field, u, "om_ratio_exact");
  requireField(field, h, "om_ratio_exact");
  if (h.values().isZero(0.0)) return 1.0;
  return std::exp(field.logDensity(u.values() - h.values()) - field.logDensity(u.values()));
}

double optimalityResidual(const LogDensityField& field, const CoeffVec& u) {
  requireField(field, u, "optimality_residual");
  const auto n = static_cast<Eigen::Index>(field.dim());
  double worst = 0.0;
  Vector e = Vector::Zero(n);
  for (Eigen::Index i = 0; i < n; ++i) {
    e[i] = 1.0;
    worst = std::max(worst, std::abs(field.logDeriv(u.values(), e)));
    e[i] = 0.0;
  }
  return worst;
}

std::vector<double> wmapInequalityScan(const LogDensityField& field, const CoeffVec& u,
                                       std::span<const CoeffVec> directions) {
  std::vector<double> ratios;
  ratios.reserve(directions.size());
  for (const auto& h : directions) ratios.push_back(omRatioExact(field, u, h));
  return ratios;
}

}  // namespace wmap
