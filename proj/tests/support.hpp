#pragma once

#include <cmath>
#include <functional>

#include "wmap/posterior.hpp"
#include "wmap/priors.hpp"
#include "wmap/rng.hpp"

namespace wmt {

using namespace wmap;

inline Vector normals(Rng& rng, std::size_t n) {
  Vector v(static_cast<Eigen::Index>(n));
  for (auto& x : v) x = rng.normal();
  return v;
}

inline double uniformIn(Rng& rng, double lo, double hi) { return lo + (hi - lo) * rng.uniform(); }

inline PriorModel randomPrior(Rng& rng, PriorFamily family, std::size_t n) {
  switch (family) {
    case PriorFamily::GaussianDiag: {
      Vector q(static_cast<Eigen::Index>(n));
      for (Eigen::Index i = 0; i < q.size(); ++i) q[i] = std::pow(double(i + 1), 2.0) * uniformIn(rng, 0.5, 2.0);
      return PriorModel::gaussianDiag(q);
    }
    case PriorFamily::Besov:
      return PriorModel::besov(uniformIn(rng, 0.5, 2.0), uniformIn(rng, 1.2, 2.0), rng.uniform() < 0.5 ? 1 : 2, n);
    case PriorFamily::Hierarchical: {
      Vector q(static_cast<Eigen::Index>(n));
      Vector e(static_cast<Eigen::Index>(n));
      for (Eigen::Index i = 0; i < q.size(); ++i) {
        q[i] = std::pow(double(i + 1), 2.0) * uniformIn(rng, 0.5, 2.0);
        e[i] = rng.normal() / double(i + 1);
      }
      return PriorModel::hierarchical(q, e, uniformIn(rng, 0.5, 2.0));
    }
  }
  return PriorModel::whiteNoise(n);
}

/// A state of typical prior size: sampling scale times standard normals.
inline Vector randomState(Rng& rng, const PriorModel& prior, double spread = 1.0) {
  return spread * prior.samplingScale().cwiseProduct(normals(rng, prior.dim()));
}

inline Matrix randomMatrix(Rng& rng, std::size_t rows, std::size_t cols, double decay = 1.0) {
  Matrix a(static_cast<Eigen::Index>(rows), static_cast<Eigen::Index>(cols));
  for (Eigen::Index j = 0; j < a.cols(); ++j)
    for (Eigen::Index i = 0; i < a.rows(); ++i) a(i, j) = rng.normal() * std::pow(double(j + 1), -decay);
  return a;
}

inline PosteriorModel randomPosterior(Rng& rng, PriorFamily family, std::size_t n, std::size_t m) {
  PriorModel prior = randomPrior(rng, family, n);
  Matrix a = randomMatrix(rng, m, n);
  Vector data = normals(rng, m);
  return PosteriorModel(std::move(prior), ForwardOperator(std::move(a)), std::move(data));
}

inline double centralDifference(const std::function<double(const Vector&)>& f, const Vector& x,
                                const Vector& h, double eps = 1e-5) {
  return (f(x + eps * h) - f(x - eps * h)) / (2.0 * eps);
}

inline constexpr PriorFamily kFamilies[] = {PriorFamily::GaussianDiag, PriorFamily::Besov,
                                            PriorFamily::Hierarchical};

}  // namespace wmt
