#include "wmap/solvers.hpp"

#include <cmath>
#include <limits>
#include <string>

#include "wmap/fomin.hpp"
#include "wmap/rng.hpp"

namespace wmap {

void SolveOptions::validate() const {
  if (maxIter < 0) fail(ErrorCode::InvalidArgument, "maxIter must be >= 0");
  if (!(gradTol > 0.0)) fail(ErrorCode::InvalidArgument, "gradTol must be positive");
  if (!(lineSearch.shrink > 0.0 && lineSearch.shrink < 1.0)) {
    fail(ErrorCode::InvalidArgument, "line-search shrink factor must lie in (0, 1)");
  }
  if (!(lineSearch.sufficientDecrease > 0.0 && lineSearch.sufficientDecrease <= 0.5)) {
    fail(ErrorCode::InvalidArgument, "sufficient-decrease constant must lie in (0, 0.5]");
  }
}

namespace {

SolveResult finish(const PosteriorModel& post, const SolveOptions& opts, Vector x, int iterations,
                   std::vector<double> history) {
  const PosteriorField field(post);
  CoeffVec argmin(std::move(x));
  SolveResult res{argmin, post.objective(argmin.values()), optimalityResidual(field, argmin), iterations,
                  false, std::move(history)};
  res.converged = res.residual <= opts.gradTol;
  return res;
}

SolveResult solveGaussianDirect(const PosteriorModel& post, const SolveOptions& opts) {
  const Matrix& a = post.op().matrix();
  Matrix k = a.transpose() * a;
  k.diagonal() += post.prior().gaussian()->cmWeights;
  const Vector rhs = a.transpose() * post.data();
  Eigen::LLT<Matrix> llt(k);
  if (llt.info() != Eigen::Success) fail(ErrorCode::TaskFailed, "normal equations are not positive definite");
  Vector x = llt.solve(rhs);
  // One step of iterative refinement.
  x += llt.solve(Vector(rhs - k * x));
  return finish(post, opts, std::move(x), 1, {});
}

SolveResult solveHierarchicalDirect(const PosteriorModel& post, const SolveOptions& opts) {
  const auto& prm = *post.prior().hierarchicalParams();
  const Matrix& a = post.op().matrix();
  const auto n = a.cols();
  const Vector qe = prm.covWeights.cwiseProduct(prm.mean);
  Matrix k = Matrix::Zero(n + 1, n + 1);
  k.topLeftCorner(n, n) = a.transpose() * a;
  k.topLeftCorner(n, n).diagonal() += prm.covWeights;
  k.block(0, n, n, 1) = -qe;
  k.block(n, 0, 1, n) = -qe.transpose();
  k(n, n) = prm.mean.dot(qe) + 1.0 / prm.rhoVariance;
  Vector rhs = Vector::Zero(n + 1);
  rhs.head(n) = a.transpose() * post.data();
  Eigen::LLT<Matrix> llt(k);
  if (llt.info() != Eigen::Success) fail(ErrorCode::TaskFailed, "joint normal equations are not positive definite");
  Vector x = llt.solve(rhs);
  x += llt.solve(Vector(rhs - k * x));
  return finish(post, opts, std::move(x), 1, {});
}

// Proximal gradient on F = f + g, where f is the quadratic misfit (plus J when J
// is not separable) and g = J otherwise. Both f-parts are quadratic forms, so
// f(y) - f(x) - f'(x)(y - x) = curvature(y - x) exactly.
SolveResult solveIterative(const PosteriorModel& post, const SolveOptions& opts) {
  const PriorModel& prior = post.prior();
  const bool split = prior.separable();
  const auto d = static_cast<Eigen::Index>(post.dim());
  const auto n = post.op().matrix().cols();
  const Matrix& a = post.op().matrix();

  Vector x = opts.initialPoint ? opts.initialPoint->values() : Vector::Zero(d);
  requireSameTrunc(static_cast<std::size_t>(x.size()), post.dim(), "solve_wmap initial point");

  auto smoothGrad = [&](const Vector& v) {
    Vector g = split ? Vector::Zero(d) : prior.jointJGradient(v);
    g.head(n) += a.transpose() * post.residual(v);
    return g;
  };
  auto curvature = [&](const Vector& dir) {
    double c = 0.5 * (a * dir.head(n)).squaredNorm();
    if (!split) c += prior.jointJ(dir);
    return c;
  };
  auto step = [&](const Vector& v, const Vector& g, double tau) -> Vector {
    Vector y = v - tau * g;
    return split ? prior.prox(y, tau) : y;
  };

  const double c = opts.lineSearch.sufficientDecrease;
  const double shrink = opts.lineSearch.shrink;
  double lip = a.squaredNorm();  // Frobenius bound on |A^T A|
  if (!split) lip += 2.0 * prior.jointJ(Vector::Ones(d)) + 1.0;
  double tau = 1.0 / std::max(lip, 1e-12);

  std::vector<double> history;
  double fx = post.objective(x);
  if (opts.recordHistory) history.push_back(fx);
  const PosteriorField field(post);

  int it = 0;
  for (; it < opts.maxIter; ++it) {
    const Vector g = smoothGrad(x);
    const Vector fullGrad = split ? Vector(g + prior.jointJGradient(x)) : g;
    if (fullGrad.cwiseAbs().maxCoeff() <= opts.gradTol &&
        optimalityResidual(field, CoeffVec(x)) <= opts.gradTol) {
      break;
    }
    tau = std::min(tau / shrink, 1e12);
    Vector y;
    Vector dir;
    for (;;) {
      y = step(x, g, tau);
      dir = y - x;
      const double dd = dir.squaredNorm();
      if (curvature(dir) <= (1.0 - c) * dd / tau) break;
      tau *= shrink;
      if (tau < 1e-300) fail(ErrorCode::TaskFailed, "line search failed to find a step");
    }
    if (dir.squaredNorm() == 0.0) break;  // stagnation at floating-point resolution
    x = std::move(y);
    fx = post.objective(x);
    if (opts.recordHistory) history.push_back(fx);
  }
  return finish(post, opts, std::move(x), it, std::move(history));
}

// Zero-extends the coefficient block; a hierarchical t stays the last entry.
CoeffVec liftState(const CoeffVec& coarse, const PosteriorModel& fine) {
  if (fine.prior().family() != PriorFamily::Hierarchical) return coarse.zeroExtended(fine.dim());
  const HierState s = HierState::fromJoint(coarse);
  return HierState{s.u.zeroExtended(fine.trunc()), s.t}.joint();
}

}  // namespace

SolveResult solveWmap(const PosteriorModel& post, const SolveOptions& opts) {
  opts.validate();
  if (opts.method == SolveMethod::Auto) {
    switch (post.prior().family()) {
      case PriorFamily::GaussianDiag: return solveGaussianDirect(post, opts);
      case PriorFamily::Hierarchical: return solveHierarchicalDirect(post, opts);
      case PriorFamily::Besov: break;
    }
  }
  return solveIterative(post, opts);
}

VerificationReport verifySolution(const PosteriorModel& post, const SolveResult& result,
                                  const VerifyOptions& opts) {
  const PosteriorField field(post);
  const CoeffVec& x = result.argmin;
  const std::size_t d = post.dim();
  VerificationReport rep;
  rep.tolerance = opts.tol;
  rep.maxCoordinateResidual = optimalityResidual(field, x);
  rep.residualPassed = rep.maxCoordinateResidual <= opts.tol;

  for (std::size_t i = 1; i <= d; ++i) {
    rep.directions.push_back(CoeffVec::basis(i, d));
    rep.directions.push_back(-CoeffVec::basis(i, d));
  }
  Rng rng(opts.seed, 0);
  std::vector<CoeffVec> random;
  for (std::size_t k = 0; k < opts.nDirections; ++k) {
    Vector h(static_cast<Eigen::Index>(d));
    for (Eigen::Index i = 0; i < h.size(); ++i) h[i] = rng.normal();
    h /= h.norm();
    random.emplace_back(std::move(h));
  }
  rep.directions.insert(rep.directions.end(), random.begin(), random.end());
  rep.ratios = wmapInequalityScan(field, x, rep.directions);
  rep.maxRatio = 0.0;
  for (double r : rep.ratios) rep.maxRatio = std::max(rep.maxRatio, r);
  rep.ratioPassed = rep.maxRatio <= 1.0 + opts.tol;

  const double f0 = post.objective(x.values());
  rep.minPerturbationGap = std::numeric_limits<double>::infinity();
  for (const auto& h : random) {
    const double gap = post.objective(x.values() + opts.perturbation * h.values()) - f0;
    rep.minPerturbationGap = std::min(rep.minPerturbationGap, gap);
  }
  rep.perturbationsChecked = random.size();
  if (random.empty()) rep.minPerturbationGap = 0.0;
  rep.perturbationPassed = rep.minPerturbationGap >= -opts.tol;
  return rep;
}

std::vector<RefinementRow> refinementStudy(
    const std::function<PosteriorModel(std::size_t)>& family, const std::vector<std::size_t>& levels,
    const SolveOptions& opts, const std::function<double(const CoeffVec&)>& norm) {
  if (levels.empty()) fail(ErrorCode::InvalidArgument, "refinement study needs at least one level");
  for (std::size_t i = 1; i < levels.size(); ++i) {
    if (levels[i] <= levels[i - 1]) fail(ErrorCode::InvalidArgument, "levels must be strictly increasing");
  }
  std::vector<RefinementRow> rows;
  for (std::size_t level : levels) {
    const PosteriorModel post = family(level);
    SolveResult res = solveWmap(post, opts);
    if (!res.converged) {
      fail(ErrorCode::TaskFailed, "refinement level N=" + std::to_string(level) +
                                      " did not converge (residual " + std::to_string(res.residual) + ")");
    }
    RefinementRow row{level, res.argmin, std::nullopt, res.objective, res.residual, res.iterations};
    if (!rows.empty()) {
      const CoeffVec& prev = rows.back().argmin;
      row.diffNorm = norm(res.argmin - liftState(prev, post));
    }
    rows.push_back(std::move(row));
  }
  return rows;
}

}  // namespace wmap
