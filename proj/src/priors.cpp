#include "wmap/priors.hpp"

#include <cmath>
#include <numbers>
#include <string>

#include "wmap/quadrature.hpp"
#include "wmap/rng.hpp"

namespace wmap {

namespace {

double sgn(double x) { return x > 0.0 ? 1.0 : (x < 0.0 ? -1.0 : 0.0); }

void requirePositive(const Vector& w, const char* what) {
  if (w.size() == 0) fail(ErrorCode::InvalidArgument, std::string(what) + " must be nonempty");
  if (!w.allFinite() || (w.array() <= 0.0).any()) {
    fail(ErrorCode::InvalidArgument, std::string(what) + " must be finite and positive");
  }
}

// Solves z + c z^{p-1} = y for z >= 0 (y >= 0) through v = z^{p-1}, where the
// equation v^{1/(p-1)} + c v = y is convex and increasing in v. Newton started
// above the root descends monotonically.
double besovProxMagnitude(double y, double c, double p) {
  if (y == 0.0) return 0.0;
  if (p == 2.0) return y / (1.0 + c);
  const double q = 1.0 / (p - 1.0);
  double v = std::min(y / c, std::pow(y, p - 1.0));
  for (int iter = 0; iter < 200; ++iter) {
    const double vq1 = std::pow(v, q - 1.0);
    const double phi = vq1 * v + c * v - y;
    const double next = v - phi / (q * vq1 + c);
    if (!(next < v)) break;
    const bool done = v - next <= 1e-16 * v;
    v = next;
    if (done) break;
  }
  return std::pow(v, q);
}

}  // namespace

const char* toString(PriorFamily family) {
  switch (family) {
    case PriorFamily::GaussianDiag: return "gaussian";
    case PriorFamily::Besov: return "besov";
    case PriorFamily::Hierarchical: return "hierarchical";
  }
  return "unknown";
}

CoeffVec HierState::joint() const {
  Vector x(static_cast<Eigen::Index>(u.trunc() + 1));
  x.head(static_cast<Eigen::Index>(u.trunc())) = u.values();
  x[x.size() - 1] = t;
  return CoeffVec(std::move(x));
}

HierState HierState::fromJoint(const CoeffVec& x) {
  if (x.trunc() < 2) fail(ErrorCode::DimensionMismatch, "hierarchical joint state needs N + 1 >= 2 entries");
  const auto n = static_cast<Eigen::Index>(x.trunc() - 1);
  return {CoeffVec(Vector(x.values().head(n))), x.values()[n]};
}

CoeffVec HierDirection::joint() const { return HierState{h, tau}.joint(); }

PriorModel::PriorModel(Params params, std::size_t trunc) : params_(std::move(params)), trunc_(trunc) {
  static constexpr double log2pi = 1.8378770664093454836;
  std::visit(
      [this](const auto& prm) {
        using T = std::decay_t<decltype(prm)>;
        if constexpr (std::is_same_v<T, GaussianDiagPrior>) {
          logNorm_ = 0.5 * (prm.cmWeights.array().log() - log2pi).sum();
        } else if constexpr (std::is_same_v<T, BesovPrior>) {
          const double logSigma = std::log(besovNormalizer(prm.wts.p()));
          logNorm_ = (logSigma - prm.wts.scale().array().log()).sum();
        } else {
          logNorm_ = 0.5 * (prm.covWeights.array().log() - log2pi).sum() -
                     0.5 * (log2pi + std::log(prm.rhoVariance));
        }
      },
      params_);
}

PriorModel PriorModel::gaussianDiag(Vector cmWeights) {
  requirePositive(cmWeights, "Cameron-Martin weights");
  const auto n = static_cast<std::size_t>(cmWeights.size());
  return PriorModel(GaussianDiagPrior{std::move(cmWeights)}, n);
}

PriorModel PriorModel::whiteNoise(std::size_t trunc) {
  if (trunc < 1) fail(ErrorCode::InvalidArgument, "trunc must be >= 1");
  return gaussianDiag(Vector::Ones(static_cast<Eigen::Index>(trunc)));
}

PriorModel PriorModel::besov(double s, double p, int d, std::size_t trunc) {
  return PriorModel(BesovPrior{BesovWeights(s, p, d, trunc)}, trunc);
}

PriorModel PriorModel::hierarchical(Vector covWeights, Vector mean, double rhoVariance) {
  requirePositive(covWeights, "covariance weights");
  if (mean.size() != covWeights.size()) {
    fail(ErrorCode::DimensionMismatch, "mean direction and covariance weights differ in length");
  }
  if (!mean.allFinite()) fail(ErrorCode::InvalidArgument, "mean direction must be finite");
  const double cmNorm = (covWeights.array() * mean.array().square()).sum();
  if (!(cmNorm > 0.0) || !std::isfinite(cmNorm)) {
    fail(ErrorCode::InvalidArgument, "mean direction must be nonzero with finite Cameron-Martin norm");
  }
  if (!(rhoVariance > 0.0) || !std::isfinite(rhoVariance)) {
    fail(ErrorCode::InvalidArgument, "rhoVariance must be positive");
  }
  const auto n = static_cast<std::size_t>(covWeights.size());
  return PriorModel(HierarchicalPrior{std::move(covWeights), std::move(mean), rhoVariance}, n);
}

PriorFamily PriorModel::family() const noexcept {
  return static_cast<PriorFamily>(params_.index());
}

std::size_t PriorModel::dim() const noexcept {
  return family() == PriorFamily::Hierarchical ? trunc_ + 1 : trunc_;
}

bool PriorModel::separable() const noexcept { return family() != PriorFamily::Hierarchical; }

void PriorModel::requireJoint(const Vector& x, const char* what) const {
  requireSameTrunc(static_cast<std::size_t>(x.size()), dim(), what);
}

void PriorModel::requireFlat(const char* what) const {
  if (family() == PriorFamily::Hierarchical) {
    fail(ErrorCode::FamilyMismatch, std::string(what) + ": hierarchical prior requires a HierState");
  }
}

void PriorModel::requireHierarchical(const char* what) const {
  if (family() != PriorFamily::Hierarchical) {
    fail(ErrorCode::FamilyMismatch, std::string(what) + ": HierState given to a non-hierarchical prior");
  }
}

double PriorModel::jointJ(const Vector& x) const {
  requireJoint(x, "J");
  return std::visit(
      [&](const auto& prm) -> double {
        using T = std::decay_t<decltype(prm)>;
        if constexpr (std::is_same_v<T, GaussianDiagPrior>) {
          return 0.5 * (prm.cmWeights.array() * x.array().square()).sum();
        } else if constexpr (std::is_same_v<T, BesovPrior>) {
          return besovNormPow(x, prm.wts);
        } else {
          const auto n = static_cast<Eigen::Index>(trunc_);
          const double t = x[n];
          const Vector r = x.head(n) - t * prm.mean;
          return 0.5 * (prm.covWeights.array() * r.array().square()).sum() +
                 0.5 * t * t / prm.rhoVariance;
        }
      },
      params_);
}

Vector PriorModel::jointJGradient(const Vector& x) const {
  requireJoint(x, "J gradient");
  return std::visit(
      [&](const auto& prm) -> Vector {
        using T = std::decay_t<decltype(prm)>;
        if constexpr (std::is_same_v<T, GaussianDiagPrior>) {
          return prm.cmWeights.cwiseProduct(x);
        } else if constexpr (std::is_same_v<T, BesovPrior>) {
          const double p = prm.wts.p();
          Vector g(x.size());
          for (Eigen::Index i = 0; i < x.size(); ++i) {
            g[i] = p * prm.wts.norm()[i] * sgn(x[i]) * std::pow(std::abs(x[i]), p - 1.0);
          }
          return g;
        } else {
          const auto n = static_cast<Eigen::Index>(trunc_);
          const double t = x[n];
          const Vector qr = prm.covWeights.cwiseProduct(x.head(n) - t * prm.mean);
          Vector g(n + 1);
          g.head(n) = qr;
          g[n] = -prm.mean.dot(qr) + t / prm.rhoVariance;
          return g;
        }
      },
      params_);
}

std::vector<double> PriorModel::segmentBreakpoints(const Vector& x, const Vector& h) const {
  requireJoint(x, "segment breakpoints");
  requireJoint(h, "segment breakpoints");
  std::vector<double> out;
  if (!besovParams()) return out;
  for (Eigen::Index i = 0; i < x.size(); ++i) {
    if (h[i] == 0.0) continue;
    const double s = x[i] / h[i];
    if (s > 0.0 && s < 1.0) out.push_back(s);
  }
  return out;
}

double PriorModel::jointJGradDir(const Vector& x, const Vector& h) const {
  requireJoint(h, "J derivative direction");
  return jointJGradient(x).dot(h);
}

double PriorModel::jointLogDensity(const Vector& x) const { return logNorm_ - jointJ(x); }

double PriorModel::logDensity(const CoeffVec& u) const {
  requireFlat("log_density");
  return jointLogDensity(u.values());
}

double PriorModel::logDensity(const HierState& x) const {
  requireHierarchical("log_density");
  return jointLogDensity(x.joint().values());
}

double PriorModel::logDeriv(const CoeffVec& u, const CoeffVec& h) const {
  requireFlat("log_deriv");
  return jointLogDeriv(u.values(), h.values());
}

double PriorModel::logDeriv(const HierState& x, const HierDirection& d) const {
  requireHierarchical("log_deriv");
  return jointLogDeriv(x.joint().values(), d.joint().values());
}

double PriorModel::J(const CoeffVec& u) const {
  requireFlat("J");
  return jointJ(u.values());
}

double PriorModel::J(const HierState& x) const {
  requireHierarchical("J");
  return jointJ(x.joint().values());
}

double PriorModel::JGradDir(const CoeffVec& u, const CoeffVec& h) const {
  requireFlat("J'");
  return jointJGradDir(u.values(), h.values());
}

double PriorModel::JGradDir(const HierState& x, const HierDirection& d) const {
  requireHierarchical("J'");
  return jointJGradDir(x.joint().values(), d.joint().values());
}

Vector PriorModel::samplingScale() const {
  return std::visit(
      [&](const auto& prm) -> Vector {
        using T = std::decay_t<decltype(prm)>;
        if constexpr (std::is_same_v<T, GaussianDiagPrior>) {
          return prm.cmWeights.cwiseInverse().cwiseSqrt();
        } else if constexpr (std::is_same_v<T, BesovPrior>) {
          return prm.wts.scale();
        } else {
          const auto n = static_cast<Eigen::Index>(trunc_);
          Vector s(n + 1);
          s.head(n) = (prm.covWeights.cwiseInverse().array() +
                       prm.rhoVariance * prm.mean.array().square())
                          .sqrt();
          s[n] = std::sqrt(prm.rhoVariance);
          return s;
        }
      },
      params_);
}

Vector PriorModel::prox(const Vector& y, double tau) const {
  requireJoint(y, "prox");
  if (!(tau > 0.0)) fail(ErrorCode::InvalidArgument, "prox step must be positive");
  return std::visit(
      [&](const auto& prm) -> Vector {
        using T = std::decay_t<decltype(prm)>;
        if constexpr (std::is_same_v<T, GaussianDiagPrior>) {
          return y.cwiseQuotient((1.0 + tau * prm.cmWeights.array()).matrix());
        } else if constexpr (std::is_same_v<T, BesovPrior>) {
          const double p = prm.wts.p();
          Vector out(y.size());
          for (Eigen::Index i = 0; i < y.size(); ++i) {
            const double c = tau * p * prm.wts.norm()[i];
            out[i] = sgn(y[i]) * besovProxMagnitude(std::abs(y[i]), c, p);
          }
          return out;
        } else {
          fail(ErrorCode::FamilyMismatch, "prox is defined only for separable priors");
        }
      },
      params_);
}

SampleBatch PriorModel::sample(std::uint64_t seed, std::size_t count, unsigned threads) const {
  if (count < 1) fail(ErrorCode::InvalidArgument, "sample count must be >= 1");
  const auto d = static_cast<Eigen::Index>(dim());
  const auto n = static_cast<Eigen::Index>(trunc_);
  Matrix draws(d, static_cast<Eigen::Index>(count));
  forEachChunk(count, kDefaultChunkSize, threads, [&](std::size_t chunk, std::size_t begin, std::size_t end) {
    Rng rng(seed, chunk);
    for (std::size_t k = begin; k < end; ++k) {
      auto col = draws.col(static_cast<Eigen::Index>(k));
      std::visit(
          [&](const auto& prm) {
            using T = std::decay_t<decltype(prm)>;
            if constexpr (std::is_same_v<T, GaussianDiagPrior>) {
              for (Eigen::Index i = 0; i < n; ++i) col[i] = rng.normal() / std::sqrt(prm.cmWeights[i]);
            } else if constexpr (std::is_same_v<T, BesovPrior>) {
              const double p = prm.wts.p();
              for (Eigen::Index i = 0; i < n; ++i) col[i] = prm.wts.scale()[i] * rng.generalizedGaussian(p);
            } else {
              const double t = std::sqrt(prm.rhoVariance) * rng.normal();
              for (Eigen::Index i = 0; i < n; ++i) {
                col[i] = t * prm.mean[i] + rng.normal() / std::sqrt(prm.covWeights[i]);
              }
              col[n] = t;
            }
          },
          params_);
    }
  });
  SampleDiagnostics diag;
  diag.chunkSize = kDefaultChunkSize;
  return SampleBatch(std::move(draws), std::nullopt, seed, SampleSource::DirectPrior, diag);
}

double besovNormalizer(double p) {
  if (!(p > 0.0)) fail(ErrorCode::InvalidArgument, "p must be positive");
  return p / (2.0 * std::tgamma(1.0 / p));
}

double fisherInformation(double p) {
  if (!(p > 1.0 && p <= 2.0)) fail(ErrorCode::InvalidArgument, "fisher_information requires 1 < p <= 2");
  const double sigma = besovNormalizer(p);
  const double half = integrateHalfLine(
      [p](double t) { return std::pow(t, 2.0 * (p - 1.0)) * std::exp(-std::pow(t, p)); });
  return p * p * sigma * 2.0 * half;
}

}  // namespace wmap
