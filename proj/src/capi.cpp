#include "wmap/wmap.h"

#include <cmath>
#include <cstring>
#include <exception>
#include <memory>
#include <new>
#include <optional>
#include <string>

#include "wmap/bregman.hpp"
#include "wmap/error.hpp"
#include "wmap/fomin.hpp"
#include "wmap/lab.hpp"
#include "wmap/posterior.hpp"
#include "wmap/priors.hpp"
#include "wmap/solvers.hpp"

struct wmap_prior {
  wmap::PriorModel model;
};

struct wmap_posterior {
  wmap::PosteriorModel model;
};

struct wmap_field {
  std::unique_ptr<wmap::LogDensityField> field;
};

struct wmap_batch {
  wmap::SampleBatch batch;
};

namespace {

thread_local std::string lastError;

wmap_status toStatus(wmap::ErrorCode code) {
  using wmap::ErrorCode;
  switch (code) {
    case ErrorCode::InvalidArgument: return WMAP_ERR_INVALID_ARGUMENT;
    case ErrorCode::DimensionMismatch: return WMAP_ERR_DIMENSION;
    case ErrorCode::FamilyMismatch: return WMAP_ERR_FAMILY;
    case ErrorCode::OutOfRange: return WMAP_ERR_OUT_OF_RANGE;
    case ErrorCode::Parse: return WMAP_ERR_PARSE;
    case ErrorCode::Validation: return WMAP_ERR_VALIDATION;
    case ErrorCode::TaskFailed: return WMAP_ERR_TASK_FAILED;
    case ErrorCode::Io: return WMAP_ERR_IO;
  }
  return WMAP_ERR_INTERNAL;
}

wmap_status setError(wmap_status status, const std::string& msg) {
  lastError = msg;
  return status;
}

template <class F>
wmap_status guarded(F&& body) {
  try {
    lastError.clear();
    return body();
  } catch (const wmap::Error& e) {
    return setError(toStatus(e.code()), e.what());
  } catch (const std::bad_alloc&) {
    return setError(WMAP_ERR_INTERNAL, "out of memory");
  } catch (const std::exception& e) {
    return setError(WMAP_ERR_INTERNAL, e.what());
  } catch (...) {
    return setError(WMAP_ERR_INTERNAL, "unknown error");
  }
}

void need(const void* p, const char* name) {
  if (p == nullptr) wmap::fail(wmap::ErrorCode::InvalidArgument, std::string(name) + " is null");
}

wmap::Vector vec(const double* x, size_t n, const char* name) {
  need(x, name);
  if (n == 0) wmap::fail(wmap::ErrorCode::InvalidArgument, std::string(name) + " is empty");
  return Eigen::Map<const wmap::Vector>(x, static_cast<Eigen::Index>(n));
}

wmap::CoeffVec coeffs(const double* x, size_t n, const char* name) { return wmap::CoeffVec(vec(x, n, name)); }

void requireDim(size_t got, size_t want) {
  if (got != want)
    wmap::fail(wmap::ErrorCode::DimensionMismatch,
               "state length " + std::to_string(got) + " does not match dimension " + std::to_string(want));
}

void copyOut(const wmap::Vector& v, double* out) {
  for (Eigen::Index i = 0; i < v.size(); ++i) out[i] = v[i];
}

}  // namespace

extern "C" {

const char* wmap_version(void) { return WMAP_VERSION; }

const char* wmap_last_error(void) { return lastError.c_str(); }

const char* wmap_status_name(wmap_status status) {
  switch (status) {
    case WMAP_OK: return "ok";
    case WMAP_ERR_INVALID_ARGUMENT: return "invalid-argument";
    case WMAP_ERR_DIMENSION: return "dimension-mismatch";
    case WMAP_ERR_FAMILY: return "family-mismatch";
    case WMAP_ERR_OUT_OF_RANGE: return "out-of-range";
    case WMAP_ERR_PARSE: return "parse-error";
    case WMAP_ERR_VALIDATION: return "validation-error";
    case WMAP_ERR_TASK_FAILED: return "task-failed";
    case WMAP_ERR_IO: return "io-error";
    case WMAP_ERR_NOT_CONVERGED: return "not-converged";
    case WMAP_ERR_INTERNAL: return "internal-error";
  }
  return "unknown";
}

wmap_status wmap_besov_norm(double s, double p, int d, const double* u, size_t n, double* out) {
  return guarded([&] {
    need(out, "out");
    *out = wmap::besovNorm(coeffs(u, n, "u"), wmap::BesovWeights(s, p, d, n));
    return WMAP_OK;
  });
}

wmap_status wmap_weighted_inner(const double* u, const double* v, const double* weights, size_t n, double* out) {
  return guarded([&] {
    need(out, "out");
    *out = wmap::weightedInner(coeffs(u, n, "u"), coeffs(v, n, "v"), vec(weights, n, "weights"));
    return WMAP_OK;
  });
}

wmap_status wmap_prior_gaussian(const double* cm_weights, size_t n, wmap_prior** out) {
  return guarded([&] {
    need(out, "out");
    *out = new wmap_prior{wmap::PriorModel::gaussianDiag(vec(cm_weights, n, "cm_weights"))};
    return WMAP_OK;
  });
}

wmap_status wmap_prior_besov(double s, double p, int d, size_t n, wmap_prior** out) {
  return guarded([&] {
    need(out, "out");
    *out = new wmap_prior{wmap::PriorModel::besov(s, p, d, n)};
    return WMAP_OK;
  });
}

wmap_status wmap_prior_hierarchical(const double* cov_weights, const double* mean, size_t n, double rho_variance,
                                    wmap_prior** out) {
  return guarded([&] {
    need(out, "out");
    *out = new wmap_prior{
        wmap::PriorModel::hierarchical(vec(cov_weights, n, "cov_weights"), vec(mean, n, "mean"), rho_variance)};
    return WMAP_OK;
  });
}

void wmap_prior_destroy(wmap_prior* prior) { delete prior; }

size_t wmap_prior_trunc(const wmap_prior* prior) { return prior ? prior->model.trunc() : 0; }

size_t wmap_prior_dim(const wmap_prior* prior) { return prior ? prior->model.dim() : 0; }

wmap_status wmap_prior_log_density(const wmap_prior* prior, const double* x, size_t dim, double* out) {
  return guarded([&] {
    need(prior, "prior");
    need(out, "out");
    requireDim(dim, prior->model.dim());
    *out = prior->model.jointLogDensity(vec(x, dim, "x"));
    return WMAP_OK;
  });
}

wmap_status wmap_prior_log_deriv(const wmap_prior* prior, const double* x, const double* h, size_t dim,
                                 double* out) {
  return guarded([&] {
    need(prior, "prior");
    need(out, "out");
    requireDim(dim, prior->model.dim());
    *out = prior->model.jointLogDeriv(vec(x, dim, "x"), vec(h, dim, "h"));
    return WMAP_OK;
  });
}

wmap_status wmap_prior_J(const wmap_prior* prior, const double* x, size_t dim, double* out) {
  return guarded([&] {
    need(prior, "prior");
    need(out, "out");
    requireDim(dim, prior->model.dim());
    *out = prior->model.jointJ(vec(x, dim, "x"));
    return WMAP_OK;
  });
}

wmap_status wmap_prior_J_grad_dir(const wmap_prior* prior, const double* x, const double* h, size_t dim,
                                  double* out) {
  return guarded([&] {
    need(prior, "prior");
    need(out, "out");
    requireDim(dim, prior->model.dim());
    *out = prior->model.jointJGradDir(vec(x, dim, "x"), vec(h, dim, "h"));
    return WMAP_OK;
  });
}

wmap_status wmap_prior_sample(const wmap_prior* prior, uint64_t seed, size_t count, unsigned threads,
                              wmap_batch** out) {
  return guarded([&] {
    need(prior, "prior");
    need(out, "out");
    *out = new wmap_batch{prior->model.sample(seed, count, threads)};
    return WMAP_OK;
  });
}

wmap_status wmap_fisher_information(double p, double* out) {
  return guarded([&] {
    need(out, "out");
    *out = wmap::fisherInformation(p);
    return WMAP_OK;
  });
}

wmap_status wmap_posterior_create(const wmap_prior* prior, const double* a, size_t m_rows, size_t n,
                                  const double* data, wmap_posterior** out) {
  return guarded([&] {
    need(prior, "prior");
    need(a, "a");
    need(out, "out");
    if (m_rows == 0 || n == 0) wmap::fail(wmap::ErrorCode::InvalidArgument, "forward matrix is empty");
    using RowMajor = Eigen::Matrix<double, Eigen::Dynamic, Eigen::Dynamic, Eigen::RowMajor>;
    wmap::Matrix mat = Eigen::Map<const RowMajor>(a, static_cast<Eigen::Index>(m_rows),
                                                  static_cast<Eigen::Index>(n));
    *out = new wmap_posterior{
        wmap::PosteriorModel(prior->model, wmap::ForwardOperator(std::move(mat)), vec(data, m_rows, "data"))};
    return WMAP_OK;
  });
}

void wmap_posterior_destroy(wmap_posterior* post) { delete post; }

size_t wmap_posterior_dim(const wmap_posterior* post) { return post ? post->model.dim() : 0; }

wmap_status wmap_posterior_log_density(const wmap_posterior* post, const double* x, size_t dim, double* out) {
  return guarded([&] {
    need(post, "post");
    need(out, "out");
    requireDim(dim, post->model.dim());
    *out = post->model.jointLogDensity(vec(x, dim, "x"));
    return WMAP_OK;
  });
}

wmap_status wmap_posterior_log_deriv(const wmap_posterior* post, const double* x, const double* h, size_t dim,
                                     double* out) {
  return guarded([&] {
    need(post, "post");
    need(out, "out");
    requireDim(dim, post->model.dim());
    *out = post->model.jointLogDeriv(vec(x, dim, "x"), vec(h, dim, "h"));
    return WMAP_OK;
  });
}

wmap_status wmap_sample_posterior_is(const wmap_posterior* post, uint64_t seed, size_t count, unsigned threads,
                                     wmap_batch** out) {
  return guarded([&] {
    need(post, "post");
    need(out, "out");
    *out = new wmap_batch{wmap::samplePosteriorIs(post->model, seed, count, threads)};
    return WMAP_OK;
  });
}

wmap_status wmap_sample_posterior_rwm(const wmap_posterior* post, uint64_t seed, size_t count, double step_size,
                                      size_t burn_in, size_t thin, wmap_batch** out) {
  return guarded([&] {
    need(post, "post");
    need(out, "out");
    wmap::RwmOptions opts;
    opts.stepSize = step_size;
    opts.burnIn = burn_in;
    opts.thin = thin;
    *out = new wmap_batch{wmap::samplePosteriorRwm(post->model, seed, count, opts)};
    return WMAP_OK;
  });
}

void wmap_batch_destroy(wmap_batch* batch) { delete batch; }

size_t wmap_batch_size(const wmap_batch* batch) { return batch ? batch->batch.size() : 0; }

size_t wmap_batch_dim(const wmap_batch* batch) { return batch ? batch->batch.dim() : 0; }

wmap_status wmap_batch_draws(const wmap_batch* batch, double* out) {
  return guarded([&] {
    need(batch, "batch");
    need(out, "out");
    const wmap::Matrix& d = batch->batch.draws();
    std::memcpy(out, d.data(), sizeof(double) * static_cast<size_t>(d.size()));
    return WMAP_OK;
  });
}

double wmap_batch_ess(const wmap_batch* batch) {
  return batch ? batch->batch.effectiveSampleSize() : std::nan("");
}

double wmap_batch_acceptance_rate(const wmap_batch* batch) {
  return batch ? batch->batch.diagnostics().acceptanceRate : -1.0;
}

wmap_status wmap_cm_estimate(const wmap_batch* batch, double* out, double* stderr_out) {
  return guarded([&] {
    need(batch, "batch");
    need(out, "out");
    copyOut(wmap::cmEstimate(batch->batch).values(), out);
    if (stderr_out != nullptr) copyOut(wmap::cmStdErrors(batch->batch), stderr_out);
    return WMAP_OK;
  });
}

wmap_status wmap_small_ball_prob(const wmap_posterior* post, const double* center, size_t dim, double eps,
                                 const wmap_batch* batch, double* estimate, double* std_error, int* no_hits) {
  return guarded([&] {
    need(post, "post");
    need(batch, "batch");
    need(estimate, "estimate");
    requireDim(dim, post->model.dim());
    auto est = wmap::smallBallProb(post->model, coeffs(center, dim, "center"), eps, batch->batch);
    *estimate = est.value;
    if (std_error != nullptr) *std_error = est.stdError;
    if (no_hits != nullptr) *no_hits = est.noHits ? 1 : 0;
    return WMAP_OK;
  });
}

wmap_status wmap_field_from_prior(const wmap_prior* prior, wmap_field** out) {
  return guarded([&] {
    need(prior, "prior");
    need(out, "out");
    *out = new wmap_field{std::make_unique<wmap::PriorField>(prior->model)};
    return WMAP_OK;
  });
}

wmap_status wmap_field_from_posterior(const wmap_posterior* post, wmap_field** out) {
  return guarded([&] {
    need(post, "post");
    need(out, "out");
    *out = new wmap_field{std::make_unique<wmap::PosteriorField>(post->model)};
    return WMAP_OK;
  });
}

void wmap_field_destroy(wmap_field* field) { delete field; }

wmap_status wmap_om_ratio_quadrature(const wmap_field* field, const double* u, const double* h, size_t dim,
                                     size_t nodes, double* out) {
  return guarded([&] {
    need(field, "field");
    need(out, "out");
    requireDim(dim, field->field->dim());
    *out = wmap::omRatioQuadrature(*field->field, coeffs(u, dim, "u"), coeffs(h, dim, "h"), nodes);
    return WMAP_OK;
  });
}

wmap_status wmap_om_ratio_exact(const wmap_field* field, const double* u, const double* h, size_t dim,
                                double* out) {
  return guarded([&] {
    need(field, "field");
    need(out, "out");
    requireDim(dim, field->field->dim());
    *out = wmap::omRatioExact(*field->field, coeffs(u, dim, "u"), coeffs(h, dim, "h"));
    return WMAP_OK;
  });
}

wmap_status wmap_optimality_residual(const wmap_field* field, const double* u, size_t dim, double* out) {
  return guarded([&] {
    need(field, "field");
    need(out, "out");
    requireDim(dim, field->field->dim());
    *out = wmap::optimalityResidual(*field->field, coeffs(u, dim, "u"));
    return WMAP_OK;
  });
}

void wmap_solve_options_default(wmap_solve_options* opts) {
  if (opts == nullptr) return;
  const wmap::SolveOptions d;
  opts->max_iter = d.maxIter;
  opts->grad_tol = d.gradTol;
  opts->shrink = d.lineSearch.shrink;
  opts->sufficient_decrease = d.lineSearch.sufficientDecrease;
  opts->force_iterative = 0;
  opts->initial_point = nullptr;
}

wmap_status wmap_solve(const wmap_posterior* post, const wmap_solve_options* opts, double* argmin,
                       wmap_solve_result* result) {
  return guarded([&] {
    need(post, "post");
    need(argmin, "argmin");
    wmap::SolveOptions so;
    if (opts != nullptr) {
      so.maxIter = opts->max_iter;
      so.gradTol = opts->grad_tol;
      so.lineSearch.shrink = opts->shrink;
      so.lineSearch.sufficientDecrease = opts->sufficient_decrease;
      so.method = opts->force_iterative ? wmap::SolveMethod::Iterative : wmap::SolveMethod::Auto;
      if (opts->initial_point != nullptr) so.initialPoint = coeffs(opts->initial_point, post->model.dim(), "initial_point");
    }
    const wmap::SolveResult r = wmap::solveWmap(post->model, so);
    copyOut(r.argmin.values(), argmin);
    if (result != nullptr) {
      result->objective = r.objective;
      result->residual = r.residual;
      result->iterations = r.iterations;
      result->converged = r.converged ? 1 : 0;
    }
    if (!r.converged)
      return setError(WMAP_ERR_NOT_CONVERGED, "solver stopped after " + std::to_string(r.iterations) +
                                                  " iterations with residual " + std::to_string(r.residual));
    return WMAP_OK;
  });
}

wmap_status wmap_verify_solution(const wmap_posterior* post, const double* argmin, size_t dim, size_t n_directions,
                                 uint64_t seed, double tol, wmap_verification* out) {
  return guarded([&] {
    need(post, "post");
    need(out, "out");
    requireDim(dim, post->model.dim());
    wmap::SolveResult r{coeffs(argmin, dim, "argmin"), 0.0, 0.0, 0, false, {}};
    r.objective = post->model.objective(r.argmin.values());
    wmap::VerifyOptions vo;
    vo.nDirections = n_directions;
    vo.seed = seed;
    vo.tol = tol;
    const auto rep = wmap::verifySolution(post->model, r, vo);
    out->max_coordinate_residual = rep.maxCoordinateResidual;
    out->max_ratio = rep.maxRatio;
    out->min_perturbation_gap = rep.minPerturbationGap;
    out->residual_passed = rep.residualPassed ? 1 : 0;
    out->ratio_passed = rep.ratioPassed ? 1 : 0;
    out->perturbation_passed = rep.perturbationPassed ? 1 : 0;
    return WMAP_OK;
  });
}

wmap_status wmap_bregman(const wmap_prior* prior, const double* u, const double* v, size_t dim, double* out) {
  return guarded([&] {
    need(prior, "prior");
    need(out, "out");
    requireDim(dim, prior->model.dim());
    *out = wmap::bregman(prior->model, coeffs(u, dim, "u"), coeffs(v, dim, "v"));
    return WMAP_OK;
  });
}

wmap_status wmap_bregman_hom(const wmap_prior* prior, const double* u, const double* v, size_t dim, double* out) {
  return guarded([&] {
    need(prior, "prior");
    need(out, "out");
    requireDim(dim, prior->model.dim());
    *out = wmap::bregmanHom(prior->model, coeffs(u, dim, "u"), coeffs(v, dim, "v"));
    return WMAP_OK;
  });
}

wmap_status wmap_bayes_cost(const wmap_posterior* post, const double* u, size_t dim, const wmap_batch* batch,
                            double* estimate, double* std_error) {
  return guarded([&] {
    need(post, "post");
    need(batch, "batch");
    need(estimate, "estimate");
    requireDim(dim, post->model.dim());
    const auto est = wmap::bayesCostG(post->model, coeffs(u, dim, "u"), batch->batch);
    *estimate = est.value;
    if (std_error != nullptr) *std_error = est.stdError;
    return WMAP_OK;
  });
}

wmap_status wmap_compare_map_cm(const wmap_posterior* post, const double* u_map, const double* u_cm, size_t dim,
                                const wmap_batch* batch, wmap_cost_report* out) {
  return guarded([&] {
    need(post, "post");
    need(batch, "batch");
    need(out, "out");
    requireDim(dim, post->model.dim());
    const auto rep =
        wmap::compareMapCm(post->model, coeffs(u_map, dim, "u_map"), coeffs(u_cm, dim, "u_cm"), batch->batch);
    out->cost_map = rep.costAtMap.value;
    out->cost_map_stderr = rep.costAtMap.stdError;
    out->cost_cm = rep.costAtCm.value;
    out->cost_cm_stderr = rep.costAtCm.stdError;
    out->paired_diff = rep.pairedDiff.value;
    out->paired_diff_stderr = rep.pairedDiff.stdError;
    out->shared_seed = rep.sharedSeed;
    out->n_samples = rep.nSamples;
    out->map_leq_cm = rep.verdict == wmap::CostVerdict::MapLeqCm ? 1 : 0;
    return WMAP_OK;
  });
}

void wmap_run_options_default(wmap_run_options* opts) {
  if (opts == nullptr) return;
  opts->out_dir = nullptr;
  opts->write_csv = 1;
  opts->write_json = 1;
  opts->threads = 1;
}

wmap_status wmap_run_experiment(const char* config_path, const wmap_run_options* opts) {
  return guarded([&] {
    need(config_path, "config_path");
    wmap_run_options o;
    wmap_run_options_default(&o);
    if (opts != nullptr) o = *opts;
    const auto cfg = wmap::lab::loadConfig(config_path);
    wmap::lab::RunSettings settings;
    settings.threads = o.threads == 0 ? 1 : o.threads;
    const auto report = wmap::lab::runExperiment(cfg, settings);
    wmap::lab::emitReport(report, o.out_dir ? std::filesystem::path(o.out_dir) : std::filesystem::path("."),
                          wmap::lab::ReportFormats{o.write_csv != 0, o.write_json != 0});
    if (report.failure) return setError(WMAP_ERR_TASK_FAILED, *report.failure);
    return WMAP_OK;
  });
}

}  // extern "C"
