#include "wmap/posterior.hpp"

#include <cmath>

#include "wmap/rng.hpp"

namespace wmap {

ForwardOperator::ForwardOperator(Matrix matrix) : matrix_(std::move(matrix)) {
  if (matrix_.rows() == 0 || matrix_.cols() == 0) {
    fail(ErrorCode::InvalidArgument, "forward operator must be nonempty");
  }
  if (!matrix_.allFinite()) fail(ErrorCode::InvalidArgument, "forward operator has non-finite entries");
}

PosteriorModel::PosteriorModel(PriorModel prior, ForwardOperator op, Vector data)
    : prior_(std::move(prior)), op_(std::move(op)), data_(std::move(data)) {
  requireSameTrunc(op_.trunc(), prior_.trunc(), "posterior: forward operator columns vs prior");
  requireSameTrunc(static_cast<std::size_t>(data_.size()), op_.measurements(),
                   "posterior: data length vs forward operator rows");
  if (!data_.allFinite()) fail(ErrorCode::InvalidArgument, "data has non-finite entries");
}

PosteriorModel PosteriorModel::prewhitened(PriorModel prior, Matrix a, Vector data, double noiseStd) {
  if (!(noiseStd > 0.0) || !std::isfinite(noiseStd)) {
    fail(ErrorCode::InvalidArgument, "noise standard deviation must be positive");
  }
  return PosteriorModel(std::move(prior), ForwardOperator(a / noiseStd), data / noiseStd);
}

void PosteriorModel::requireJoint(const Vector& x, const char* what) const {
  requireSameTrunc(static_cast<std::size_t>(x.size()), dim(), what);
}

Vector PosteriorModel::residual(const Vector& x) const {
  requireJoint(x, "posterior residual");
  return op_.matrix() * x.head(op_.matrix().cols()) - data_;
}

Vector PosteriorModel::applyForward(const Vector& x) const {
  requireJoint(x, "forward operator");
  return op_.matrix() * x.head(op_.matrix().cols());
}

double PosteriorModel::jointLogDensity(const Vector& x) const {
  return -0.5 * residual(x).squaredNorm() + prior_.jointLogDensity(x);
}

double PosteriorModel::jointLogDeriv(const Vector& x, const Vector& h) const {
  requireJoint(h, "posterior log_deriv direction");
  return -residual(x).dot(applyForward(h)) + prior_.jointLogDeriv(x, h);
}

double PosteriorModel::objective(const Vector& x) const {
  return 0.5 * residual(x).squaredNorm() + prior_.jointJ(x);
}

Vector PosteriorModel::objectiveGradient(const Vector& x) const {
  Vector g = prior_.jointJGradient(x);
  g.head(op_.matrix().cols()) += op_.matrix().transpose() * residual(x);
  return g;
}

double PosteriorModel::logDensity(const CoeffVec& u) const {
  if (prior_.family() == PriorFamily::Hierarchical) {
    fail(ErrorCode::FamilyMismatch, "posterior log_density: hierarchical prior requires a HierState");
  }
  return jointLogDensity(u.values());
}

double PosteriorModel::logDensity(const HierState& x) const {
  if (prior_.family() != PriorFamily::Hierarchical) {
    fail(ErrorCode::FamilyMismatch, "posterior log_density: HierState given to a non-hierarchical prior");
  }
  return jointLogDensity(x.joint().values());
}

double PosteriorModel::logDeriv(const CoeffVec& u, const CoeffVec& h) const {
  if (prior_.family() == PriorFamily::Hierarchical) {
    fail(ErrorCode::FamilyMismatch, "posterior log_deriv: hierarchical prior requires a HierState");
  }
  return jointLogDeriv(u.values(), h.values());
}

double PosteriorModel::logDeriv(const HierState& x, const HierDirection& d) const {
  if (prior_.family() != PriorFamily::Hierarchical) {
    fail(ErrorCode::FamilyMismatch, "posterior log_deriv: HierState given to a non-hierarchical prior");
  }
  return jointLogDeriv(x.joint().values(), d.joint().values());
}

SampleBatch samplePosteriorIs(const PosteriorModel& post, std::uint64_t seed, std::size_t count,
                              unsigned threads) {
  SampleBatch prior = post.prior().sample(seed, count, threads);
  const Matrix& draws = prior.draws();
  const auto n = post.op().matrix().cols();
  const Matrix resid = (post.op().matrix() * draws.topRows(n)).colwise() - post.data();
  Vector logW = -0.5 * resid.colwise().squaredNorm().transpose();
  return SampleBatch(draws, std::move(logW), seed, SampleSource::PriorImportance, prior.diagnostics());
}

SampleBatch samplePosteriorRwm(const PosteriorModel& post, std::uint64_t seed, std::size_t count,
                               const RwmOptions& opts) {
  if (!(opts.stepSize > 0.0)) fail(ErrorCode::InvalidArgument, "RWM step size must be positive");
  if (count < 1) fail(ErrorCode::InvalidArgument, "RWM needs at least one retained state");
  if (opts.thin < 1) fail(ErrorCode::InvalidArgument, "thinning must be >= 1");
  const auto d = static_cast<Eigen::Index>(post.dim());
  Vector x = opts.start ? opts.start->values() : Vector::Zero(d);
  if (x.size() != d) fail(ErrorCode::DimensionMismatch, "RWM start point has wrong dimension");
  const Vector scale = opts.stepSize * post.prior().samplingScale();

  Rng rng(seed, 0);
  double logp = post.jointLogDensity(x);
  Matrix kept(d, static_cast<Eigen::Index>(count));
  std::size_t accepted = 0;
  std::size_t proposals = 0;
  const std::size_t total = opts.burnIn + count * opts.thin;
  Vector prop(d);
  for (std::size_t it = 0; it < total; ++it) {
    for (Eigen::Index i = 0; i < d; ++i) prop[i] = x[i] + scale[i] * rng.normal();
    const double logq = post.jointLogDensity(prop);
    const double u = rng.uniformOpen();
    const bool accept = std::log(u) < logq - logp;
    if (accept) {
      x = prop;
      logp = logq;
    }
    if (it >= opts.burnIn) {
      ++proposals;
      if (accept) ++accepted;
      const std::size_t j = it - opts.burnIn;
      if ((j + 1) % opts.thin == 0) kept.col(static_cast<Eigen::Index>(j / opts.thin)) = x;
    }
  }
  SampleDiagnostics diag;
  diag.chunkSize = total;
  diag.acceptanceRate = static_cast<double>(accepted) / static_cast<double>(proposals);
  diag.burnIn = opts.burnIn;
  diag.thin = opts.thin;
  return SampleBatch(std::move(kept), std::nullopt, seed, SampleSource::RwMetropolis, diag);
}

CoeffVec cmEstimate(const SampleBatch& batch) {
  const Vector w = batch.normalizedWeights();
  return CoeffVec(Vector(batch.draws() * w));
}

Vector cmStdErrors(const SampleBatch& batch) {
  Vector se(static_cast<Eigen::Index>(batch.dim()));
  for (Eigen::Index i = 0; i < se.size(); ++i) {
    se[i] = batch.expectation(Vector(batch.draws().row(i).transpose())).stdError;
  }
  return se;
}

SmallBallEstimate smallBallProb(const PosteriorModel& post, const CoeffVec& center, double eps,
                                const SampleBatch& batch) {
  if (!(eps > 0.0)) fail(ErrorCode::InvalidArgument, "ball radius must be positive");
  requireSameTrunc(center.trunc(), post.dim(), "small_ball_prob center");
  requireSameTrunc(batch.dim(), post.dim(), "small_ball_prob batch");
  const double eps2 = eps * eps;
  Vector hits(static_cast<Eigen::Index>(batch.size()));
  bool any = false;
  for (std::size_t k = 0; k < batch.size(); ++k) {
    const bool in = (batch.draw(k) - center.values()).squaredNorm() < eps2;
    hits[static_cast<Eigen::Index>(k)] = in ? 1.0 : 0.0;
    any = any || in;
  }
  if (!any) return {0.0, 0.0, true};
  const McEstimate est = batch.expectation(hits);
  return {est.value, est.stdError, false};
}

}  // namespace wmap
