#include "wmap/bregman.hpp"

#include <cmath>

namespace wmap {

namespace {

void requireState(const PriorModel& prior, const CoeffVec& x, const char* what) {
  requireSameTrunc(x.trunc(), prior.dim(), what);
}

// J'(v)u for every draw v, as a row vector over the batch.
Vector gradDirAll(const PriorModel& prior, const Vector& u, const SampleBatch& batch) {
  Vector out(static_cast<Eigen::Index>(batch.size()));
  for (std::size_t k = 0; k < batch.size(); ++k) {
    out[static_cast<Eigen::Index>(k)] = prior.jointJGradDir(Vector(batch.draw(k)), u);
  }
  return out;
}

}  // namespace

const char* toString(CostVerdict verdict) {
  return verdict == CostVerdict::MapLeqCm ? "map-leq-cm" : "inconclusive";
}

double bregman(const PriorModel& prior, const CoeffVec& u, const CoeffVec& v) {
  requireState(prior, u, "bregman");
  requireState(prior, v, "bregman");
  return prior.jointJ(u.values()) - prior.jointJ(v.values()) -
         prior.jointJGradDir(v.values(), u.values() - v.values());
}

double bregmanHom(const PriorModel& prior, const CoeffVec& u, const CoeffVec& v) {
  requireState(prior, u, "bregman_hom");
  requireState(prior, v, "bregman_hom");
  return prior.jointJ(u.values()) + prior.jointLogDeriv(v.values(), u.values());
}

McEstimate bayesCostG(const PosteriorModel& post, const CoeffVec& u, const SampleBatch& batch) {
  requireState(post.prior(), u, "bayes_cost_G");
  requireSameTrunc(batch.dim(), post.dim(), "bayes_cost_G batch");
  const Vector au = post.applyForward(u.values());
  const Matrix av = post.op().matrix() * batch.draws().topRows(post.op().matrix().cols());
  const Vector misfit = 0.5 * (av.colwise() - au).colwise().squaredNorm().transpose();
  const Vector values = misfit.array() + post.prior().jointJ(u.values()) -
                        gradDirAll(post.prior(), u.values(), batch).array();
  return batch.expectation(values);
}

CostReport compareMapCm(const PosteriorModel& post, const CoeffVec& uMap, const CoeffVec& uCm,
                        const SampleBatch& batch) {
  const PriorModel& prior = post.prior();
  requireState(prior, uMap, "compare_map_cm");
  requireState(prior, uCm, "compare_map_cm");
  requireSameTrunc(batch.dim(), post.dim(), "compare_map_cm batch");

  const Vector atMap = prior.jointJ(uMap.values()) - gradDirAll(prior, uMap.values(), batch).array();
  const Vector atCm = prior.jointJ(uCm.values()) - gradDirAll(prior, uCm.values(), batch).array();

  CostReport rep;
  rep.costAtMap = batch.expectation(atMap);
  rep.costAtCm = batch.expectation(atCm);
  rep.pairedDiff = batch.expectation(Vector(atMap - atCm));
  rep.sharedSeed = batch.seed();
  rep.nSamples = batch.size();
  const double se = rep.pairedDiff.stdError;
  const bool usable = batch.size() >= 2 && std::isfinite(se);
  rep.verdict = usable && rep.costAtMap.value <= rep.costAtCm.value + 3.0 * se ? CostVerdict::MapLeqCm
                                                                               : CostVerdict::Inconclusive;
  return rep;
}

}  // namespace wmap
