#pragma once

// wMAP estimates as minimisers of F(x) = 1/2 |A u - m|^2 + J(x).

#include <cstddef>
#include <cstdint>
#include <functional>
#include <optional>
#include <vector>

#include "wmap/posterior.hpp"

namespace wmap {

struct LineSearch {
  double shrink = 0.5;
  double sufficientDecrease = 1e-4;
};

enum class SolveMethod {
  Auto,       // closed form for Gaussian and hierarchical priors, iterative for Besov
  Iterative,  // force the iterative path for every family
};

struct SolveOptions {
  int maxIter = 50000;
  double gradTol = 1e-8;
  std::optional<CoeffVec> initialPoint;  // zero (the prior mode) when absent
  LineSearch lineSearch;
  SolveMethod method = SolveMethod::Auto;
  bool recordHistory = false;

  void validate() const;
};

struct SolveResult {
  CoeffVec argmin;  // joint state; (u, t) for the hierarchical prior
  double objective = 0.0;
  double residual = 0.0;
  int iterations = 0;
  bool converged = false;
  std::vector<double> objectiveHistory;  // filled when recordHistory is set
};

/// Direct: Gaussian solves (A^T A + Q) u = A^T m; hierarchical solves the
/// (N+1)x(N+1) joint normal equations. Iterative: proximal-gradient steps
/// (explicit step on the misfit, exact prox of J when J is separable) with
/// backtracking. residual is always optimalityResidual at the returned point,
/// and converged implies residual <= gradTol.
SolveResult solveWmap(const PosteriorModel& post, const SolveOptions& opts = {});

struct VerificationReport {
  double maxCoordinateResidual = 0.0;
  bool residualPassed = false;
  std::vector<CoeffVec> directions;  // +e_i, -e_i, then the random ones
  std::vector<double> ratios;
  double maxRatio = 0.0;
  bool ratioPassed = false;
  std::size_t perturbationsChecked = 0;
  double minPerturbationGap = 0.0;  // min F(x + delta h) - F(x)
  bool perturbationPassed = true;
  double tolerance = 0.0;

  bool passed() const { return residualPassed && ratioPassed && perturbationPassed; }
};

struct VerifyOptions {
  std::size_t nDirections = 10;
  std::uint64_t seed = 0;
  double tol = 1e-8;
  double perturbation = 1e-3;
};

/// (a) coordinate residual, (b) r_h <= 1 + tol over +-e_i and random unit
/// directions, (c) F(x) <= F(x + delta h) + tol for the same random directions.
VerificationReport verifySolution(const PosteriorModel& post, const SolveResult& result,
                                  const VerifyOptions& opts = {});

struct RefinementRow {
  std::size_t trunc = 0;
  CoeffVec argmin;
  std::optional<double> diffNorm;  // absent on the first level
  double objective = 0.0;
  double residual = 0.0;
  int iterations = 0;
};

/// Solves the nested problems produced by `family` at each level and reports
/// the weighted norm of successive differences of zero-extended solutions.
/// `norm` receives the difference and returns its size.
std::vector<RefinementRow> refinementStudy(
    const std::function<PosteriorModel(std::size_t)>& family, const std::vector<std::size_t>& levels,
    const SolveOptions& opts, const std::function<double(const CoeffVec&)>& norm);

}  // namespace wmap
