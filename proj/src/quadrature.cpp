#include "wmap/quadrature.hpp"

#include <cmath>
#include <map>
#include <memory>
#include <mutex>
#include <numbers>

#include <boost/math/quadrature/exp_sinh.hpp>

#include "wmap/error.hpp"

namespace wmap {

GaussLegendreRule::GaussLegendreRule(std::size_t n) : nodes_(n), weights_(n) {
  if (n < 2) fail(ErrorCode::InvalidArgument, "Gauss-Legendre rule needs at least 2 nodes");
  const std::size_t half = (n + 1) / 2;
  const double dn = static_cast<double>(n);
  for (std::size_t i = 0; i < half; ++i) {
    // Tricomi initial guess, then Newton on P_n.
    double x = std::cos(std::numbers::pi * (static_cast<double>(i) + 0.75) / (dn + 0.5));
    double dp = 0.0;
    for (int iter = 0; iter < 100; ++iter) {
      double p0 = 1.0;
      double p1 = x;
      for (std::size_t k = 2; k <= n; ++k) {
        const double dk = static_cast<double>(k);
        const double p2 = ((2.0 * dk - 1.0) * x * p1 - (dk - 1.0) * p0) / dk;
        p0 = p1;
        p1 = p2;
      }
      dp = dn * (x * p1 - p0) / (x * x - 1.0);
      const double dx = p1 / dp;
      x -= dx;
      if (std::abs(dx) < 1e-16) break;
    }
    const double w = 2.0 / ((1.0 - x * x) * dp * dp);
    nodes_[i] = -x;
    nodes_[n - 1 - i] = x;
    weights_[i] = w;
    weights_[n - 1 - i] = w;
  }
  if (n % 2 == 1) nodes_[n / 2] = 0.0;
}

double GaussLegendreRule::integrate(const std::function<double(double)>& f, double a,
                                    double b) const {
  const double mid = 0.5 * (a + b);
  const double half = 0.5 * (b - a);
  double acc = 0.0;
  for (std::size_t i = 0; i < nodes_.size(); ++i) acc += weights_[i] * f(mid + half * nodes_[i]);
  return half * acc;
}

double GaussLegendreRule::integrateGraded(const std::function<double(double)>& f, double a,
                                           double b) const {
  const double len = b - a;
  double acc = 0.0;
  for (std::size_t i = 0; i < nodes_.size(); ++i) {
    const double t = 0.5 * (nodes_[i] + 1.0);
    const double phi = t * t * t * (10.0 + t * (-15.0 + 6.0 * t));
    const double dphi = 30.0 * t * t * (1.0 - t) * (1.0 - t);
    acc += weights_[i] * dphi * f(a + len * phi);
  }
  return 0.5 * len * acc;
}

const GaussLegendreRule& gaussLegendre(std::size_t n) {
  static std::mutex mu;
  static std::map<std::size_t, std::unique_ptr<GaussLegendreRule>> cache;
  std::lock_guard<std::mutex> lock(mu);
  auto& slot = cache[n];
  if (!slot) slot = std::make_unique<GaussLegendreRule>(n);
  return *slot;
}

double integrateHalfLine(const std::function<double(double)>& f, double relTol) {
  boost::math::quadrature::exp_sinh<double> integrator;
  return integrator.integrate(f, 0.0, std::numeric_limits<double>::infinity(), relTol);
}

}  // namespace wmap
