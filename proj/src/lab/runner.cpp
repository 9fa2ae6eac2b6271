#include <chrono>
#include <cmath>
#include <ctime>

#include "wmap/bregman.hpp"
#include "wmap/lab.hpp"
#include "wmap/rng.hpp"

namespace wmap::lab {

namespace {

// Stream indices under the config seed, kept apart from the sampler chunks.
constexpr std::uint64_t kPointStream = 1u << 20;
constexpr std::uint64_t kDirectionStream = (1u << 20) + 1;

std::vector<std::string> stateNames(const PriorModel& prior) {
  std::vector<std::string> names;
  for (std::size_t i = 1; i <= prior.trunc(); ++i) names.push_back("u" + std::to_string(i));
  if (prior.family() == PriorFamily::Hierarchical) names.emplace_back("t");
  return names;
}

Cell integer(std::size_t v) { return static_cast<std::int64_t>(v); }

std::string utcTimestamp() {
  const std::time_t now = std::chrono::system_clock::to_time_t(std::chrono::system_clock::now());
  std::tm tm{};
  gmtime_r(&now, &tm);
  char buf[32];
  std::strftime(buf, sizeof buf, "%Y-%m-%dT%H:%M:%SZ", &tm);
  return buf;
}

std::vector<CoeffVec> randomDirections(std::uint64_t seed, std::size_t count, std::size_t dim, double length) {
  Rng rng(seed, kDirectionStream);
  std::vector<CoeffVec> out;
  for (std::size_t k = 0; k < count; ++k) {
    Vector h(static_cast<Eigen::Index>(dim));
    for (Eigen::Index i = 0; i < h.size(); ++i) h[i] = rng.normal();
    out.emplace_back(Vector(length * h / h.norm()));
  }
  return out;
}

void noteBatch(Report& rep, const SampleBatch& batch) {
  if (!batch.flagged()) return;
  if (batch.source() == SampleSource::RwMetropolis) {
    rep.warnings.push_back("rw-metropolis acceptance rate " + std::to_string(batch.diagnostics().acceptanceRate) +
                           " outside [0.1, 0.6]");
  } else {
    rep.warnings.push_back("importance sampling ESS " + std::to_string(batch.effectiveSampleSize()) +
                           " below 1% of " + std::to_string(batch.size()) + " draws");
  }
}

Table solutionTable(const PriorModel& prior, const CoeffVec& x) {
  Table t{"solution", {"name", "value"}, {}};
  const auto names = stateNames(prior);
  for (std::size_t i = 0; i < names.size(); ++i) t.rows.push_back({names[i], x[i]});
  return t;
}

SolveResult solveAndNote(Report& rep, const PosteriorModel& post, const SolveOptions& opts) {
  SolveResult res = solveWmap(post, opts);
  if (!res.converged) {
    rep.warnings.push_back("solver did not converge: residual " + std::to_string(res.residual) + " after " +
                           std::to_string(res.iterations) + " iterations");
    rep.failure = "non-convergence";
  }
  return res;
}

void runSamplePrior(Report& rep, const PosteriorModel& post, const ExperimentConfig& cfg, unsigned threads) {
  const SampleBatch batch = post.prior().sample(cfg.seed, cfg.options.count, threads);
  Table t{"samples", {"sample_id"}, {}};
  for (auto& n : stateNames(post.prior())) t.columns.push_back(n);
  for (std::size_t k = 0; k < batch.size(); ++k) {
    std::vector<Cell> row{integer(k)};
    for (std::size_t i = 0; i < batch.dim(); ++i) row.emplace_back(batch.draws()(static_cast<Eigen::Index>(i), static_cast<Eigen::Index>(k)));
    t.rows.push_back(std::move(row));
  }
  rep.tables.push_back(std::move(t));
}

void runSolveMap(Report& rep, const PosteriorModel& post, const ExperimentConfig& cfg) {
  const SolveResult res = solveAndNote(rep, post, cfg.options.solver);
  rep.tables.push_back(solutionTable(post.prior(), res.argmin));
  rep.tables.push_back({"summary",
                        {"objective", "residual", "iterations", "converged"},
                        {{res.objective, res.residual, integer(static_cast<std::size_t>(res.iterations)), res.converged}}});
}

SampleBatch posteriorBatch(Report& rep, const PosteriorModel& post, const ExperimentConfig& cfg, unsigned threads) {
  const auto& o = cfg.options;
  if (o.sampler == "rwm") {
    return samplePosteriorRwm(post, cfg.seed, o.samples, {o.stepSize, o.burnIn, o.thin, std::nullopt});
  }
  SampleBatch is = samplePosteriorIs(post, cfg.seed, o.samples, threads);
  if (o.sampler == "auto" && is.flagged()) {
    rep.warnings.push_back("importance weights degenerate (ESS " + std::to_string(is.effectiveSampleSize()) +
                           "); falling back to rw-metropolis");
    return samplePosteriorRwm(post, cfg.seed, o.samples, {o.stepSize, o.burnIn, o.thin, std::nullopt});
  }
  return is;
}

void runEstimateCm(Report& rep, const PosteriorModel& post, const ExperimentConfig& cfg, unsigned threads) {
  const SampleBatch batch = posteriorBatch(rep, post, cfg, threads);
  noteBatch(rep, batch);
  const CoeffVec cm = cmEstimate(batch);
  const Vector se = cmStdErrors(batch);
  Table t{"cm", {"name", "value", "stderr"}, {}};
  const auto names = stateNames(post.prior());
  for (std::size_t i = 0; i < names.size(); ++i) t.rows.push_back({names[i], cm[i], se[static_cast<Eigen::Index>(i)]});
  rep.tables.push_back(std::move(t));
  const double acc = batch.diagnostics().acceptanceRate;
  rep.tables.push_back({"diagnostics",
                        {"sampler", "n_samples", "ess", "acceptance_rate", "chunk_size"},
                        {{toString(batch.source()), integer(batch.size()), batch.effectiveSampleSize(),
                          acc >= 0.0 ? Cell(acc) : Cell(std::monostate{}), integer(batch.diagnostics().chunkSize)}}});
}

void runVerifyOm(Report& rep, const PosteriorModel& post, const ExperimentConfig& cfg) {
  const auto& o = cfg.options;
  CoeffVec point = CoeffVec::zeros(post.dim());
  if (o.point == "map") {
    point = solveAndNote(rep, post, o.solver).argmin;
  } else {
    point = post.prior().sample(streamSeed(cfg.seed, kPointStream), 1).drawVec(0);
  }
  std::unique_ptr<LogDensityField> field;
  if (o.field == "prior") {
    field = std::make_unique<PriorField>(post.prior());
  } else {
    field = std::make_unique<PosteriorField>(post);
  }
  Table t{"om", {"direction_id", "ratio_quadrature", "ratio_exact", "rel_err"}, {}};
  const auto dirs = randomDirections(cfg.seed, o.directions, post.dim(), o.scale);
  for (std::size_t k = 0; k < dirs.size(); ++k) {
    const double quad = omRatioQuadrature(*field, point, dirs[k], o.nodes);
    const double exact = omRatioExact(*field, point, dirs[k]);
    t.rows.push_back({integer(k), quad, exact, std::abs(quad - exact) / exact});
  }
  rep.tables.push_back(std::move(t));
}

void runVerifyWmap(Report& rep, const PosteriorModel& post, const ExperimentConfig& cfg, unsigned threads) {
  const auto& o = cfg.options;
  const SolveResult res = solveAndNote(rep, post, o.solver);
  const VerificationReport v = verifySolution(post, res, {o.directions, cfg.seed, o.tol, o.perturbation});
  const std::size_t d = post.dim();
  Table scan{"scan", {"direction_id", "kind", "ratio"}, {}};
  const auto names = stateNames(post.prior());
  for (std::size_t k = 0; k < v.directions.size(); ++k) {
    std::string kind = "random";
    if (k < 2 * d) kind = std::string(k % 2 == 0 ? "+" : "-") + "e_" + names[k / 2];
    scan.rows.push_back({integer(k), kind, v.ratios[k]});
  }
  rep.tables.push_back(solutionTable(post.prior(), res.argmin));
  rep.tables.push_back(std::move(scan));
  rep.tables.push_back({"summary",
                        {"max_coordinate_residual", "max_ratio", "min_perturbation_gap", "residual_passed",
                         "ratio_passed", "perturbation_passed"},
                        {{v.maxCoordinateResidual, v.maxRatio, v.minPerturbationGap, v.residualPassed, v.ratioPassed,
                          v.perturbationPassed}}});
  bool ok = v.passed();
  if (!o.eps.empty()) {
    const SampleBatch batch = samplePosteriorIs(post, cfg.seed, o.samples, threads);
    noteBatch(rep, batch);
    const PosteriorField field(post);
    Table balls{"small_ball", {"direction_id", "eps", "ratio_mc", "stderr", "ratio_exact", "within_bound"}, {}};
    const auto dirs = randomDirections(cfg.seed, o.ballDirections, d, o.ballStep);
    for (double eps : o.eps) {
      const SmallBallEstimate at = smallBallProb(post, res.argmin, eps, batch);
      for (std::size_t k = 0; k < dirs.size(); ++k) {
        const SmallBallEstimate off = smallBallProb(post, res.argmin - dirs[k], eps, batch);
        const double exact = omRatioExact(field, res.argmin, dirs[k]);
        if (at.noHits || off.noHits) {
          rep.warnings.push_back("small ball eps=" + std::to_string(eps) + " has no hits");
          balls.rows.push_back({integer(k), eps, std::monostate{}, std::monostate{}, exact, std::monostate{}});
          continue;
        }
        const double ratio = off.value / at.value;
        const double se = ratio * std::hypot(off.stdError / off.value, at.stdError / at.value);
        const bool within = ratio <= 1.0 + 3.0 * se;
        ok = ok && within;
        balls.rows.push_back({integer(k), eps, ratio, se, exact, within});
      }
    }
    rep.tables.push_back(std::move(balls));
  }
  if (!ok && !rep.failure) rep.failure = "verification failed";
}

void runBregmanCompare(Report& rep, const PosteriorModel& post, const ExperimentConfig& cfg, unsigned threads) {
  const SolveResult res = solveAndNote(rep, post, cfg.options.solver);
  const SampleBatch batch = samplePosteriorIs(post, cfg.seed, cfg.options.samples, threads);
  noteBatch(rep, batch);
  const CoeffVec cm = cmEstimate(batch);
  const CostReport cost = compareMapCm(post, res.argmin, cm, batch);
  rep.tables.push_back({"costs",
                        {"estimator", "cost", "stderr"},
                        {{"map", cost.costAtMap.value, cost.costAtMap.stdError},
                         {"cm", cost.costAtCm.value, cost.costAtCm.stdError}}});
  rep.tables.push_back({"summary",
                        {"paired_diff", "paired_stderr", "verdict", "n_samples", "seed", "ess"},
                        {{cost.pairedDiff.value, cost.pairedDiff.stdError, toString(cost.verdict),
                          integer(cost.nSamples), static_cast<std::int64_t>(cost.sharedSeed),
                          batch.effectiveSampleSize()}}});
}

void runRefineStudy(Report& rep, const ExperimentConfig& cfg) {
  const auto& o = cfg.options;
  auto family = [&](std::size_t n) { return buildProblem(cfg, n); };
  const PriorModel first = family(o.levels.front()).prior();
  const double p = o.normP ? *o.normP : (first.besovParams() ? first.besovParams()->wts.p() : 2.0);
  auto norm = [&](const CoeffVec& diff) {
    const std::size_t n = first.family() == PriorFamily::Hierarchical ? diff.trunc() - 1 : diff.trunc();
    const CoeffVec u(Vector(diff.values().head(static_cast<Eigen::Index>(n))));
    return besovNorm(u, BesovWeights(o.normSmoothness, p, 1, n));
  };
  const auto rows = refinementStudy(family, o.levels, o.solver, norm);
  Table t{"refinement", {"N", "diff_norm", "objective", "residual", "iterations"}, {}};
  for (const auto& r : rows) {
    t.rows.push_back({integer(r.trunc), r.diffNorm ? Cell(*r.diffNorm) : Cell(std::monostate{}), r.objective,
                      r.residual, integer(static_cast<std::size_t>(r.iterations))});
  }
  rep.tables.push_back(std::move(t));
}

}  // namespace

Report runExperiment(const ExperimentConfig& cfg, const RunSettings& settings) {
  Report rep;
  rep.config = cfg.echo;
  const unsigned threads = std::max(1u, settings.threads);
  rep.provenance["task"] = toString(cfg.task);
  rep.provenance["seed"] = cfg.seed;
  rep.provenance["version"] = WMAP_VERSION;
  if (settings.timestamp) rep.provenance["timestamp"] = utcTimestamp();
  rep.provenance["chunking"] = {{"chunk_size", kDefaultChunkSize}, {"threads", threads}};

  std::optional<PosteriorModel> post;
  if (cfg.task != Task::RefineStudy) {
    try {
      post = buildProblem(cfg, *cfg.trunc);
    } catch (const Error& e) {
      if (e.code() == ErrorCode::Validation) throw;
      fail(ErrorCode::Validation, e.what());
    }
  }
  try {
    switch (cfg.task) {
      case Task::SamplePrior: runSamplePrior(rep, *post, cfg, threads); break;
      case Task::SolveMap: runSolveMap(rep, *post, cfg); break;
      case Task::EstimateCm: runEstimateCm(rep, *post, cfg, threads); break;
      case Task::VerifyOm: runVerifyOm(rep, *post, cfg); break;
      case Task::VerifyWmap: runVerifyWmap(rep, *post, cfg, threads); break;
      case Task::BregmanCompare: runBregmanCompare(rep, *post, cfg, threads); break;
      case Task::RefineStudy: runRefineStudy(rep, cfg); break;
    }
  } catch (const Error& e) {
    if (e.code() == ErrorCode::TaskFailed || e.code() == ErrorCode::Validation) throw;
    fail(ErrorCode::TaskFailed, e.what());
  }
  return rep;
}

}  // namespace wmap::lab
