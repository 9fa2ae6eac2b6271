#pragma once

// Bregman distances of the prior functional J and the Bayes cost
//   G(u) = E_mu[ 1/2 |A u - A v|^2 + D~_J(u, v) ],
// whose minimiser is the wMAP estimate. States are joint vectors (u, t for the
// hierarchical prior).

#include <cstdint>

#include "wmap/posterior.hpp"

namespace wmap {

/// D_J(u, v) = J(u) - J(v) - J'(v)(u - v)
double bregman(const PriorModel& prior, const CoeffVec& u, const CoeffVec& v);

/// D~_J(u, v) = J(u) + beta_u(v) = J(u) - J'(v)u
double bregmanHom(const PriorModel& prior, const CoeffVec& u, const CoeffVec& v);

/// Weighted Monte Carlo estimate of G(u) over the batch draws v.
McEstimate bayesCostG(const PosteriorModel& post, const CoeffVec& u, const SampleBatch& batch);

enum class CostVerdict { MapLeqCm, Inconclusive };

const char* toString(CostVerdict verdict);

struct CostReport {
  McEstimate costAtMap;
  McEstimate costAtCm;
  McEstimate pairedDiff;  // E[D~(uMap, v) - D~(uCm, v)] on the shared draws
  std::uint64_t sharedSeed = 0;
  std::size_t nSamples = 0;
  CostVerdict verdict = CostVerdict::Inconclusive;
};

/// Compares E[D~_J(uMap, v)] with E[D~_J(uCm, v)] on one batch. The verdict is
/// MapLeqCm when costAtMap <= costAtCm + 3 * stderr of the paired difference.
CostReport compareMapCm(const PosteriorModel& post, const CoeffVec& uMap, const CoeffVec& uCm,
                        const SampleBatch& batch);

}  // namespace wmap
