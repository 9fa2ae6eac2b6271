/*
 * C interface to the wMAP laboratory.
 *
 * Objects are opaque handles created by wmap_*_create / factory functions and
 * released with the matching *_destroy. Every fallible call returns a
 * wmap_status; on failure wmap_last_error() gives a message for the calling
 * thread. State vectors are flat arrays of length dim: the coefficients, plus
 * a trailing hyperparameter t for the hierarchical prior.
 */
#ifndef WMAP_WMAP_H
#define WMAP_WMAP_H

#include <stddef.h>
#include <stdint.h>

#if defined(WMAP_BUILDING_LIBRARY)
#define WMAP_API __attribute__((visibility("default")))
#else
#define WMAP_API
#endif

#ifdef __cplusplus
extern "C" {
#endif

typedef enum wmap_status {
  WMAP_OK = 0,
  WMAP_ERR_INVALID_ARGUMENT = 1,
  WMAP_ERR_DIMENSION = 2,
  WMAP_ERR_FAMILY = 3,
  WMAP_ERR_OUT_OF_RANGE = 4,
  WMAP_ERR_PARSE = 5,
  WMAP_ERR_VALIDATION = 6,
  WMAP_ERR_TASK_FAILED = 7,
  WMAP_ERR_IO = 8,
  WMAP_ERR_NOT_CONVERGED = 9,
  WMAP_ERR_INTERNAL = 10
} wmap_status;

typedef struct wmap_prior wmap_prior;
typedef struct wmap_posterior wmap_posterior;
typedef struct wmap_field wmap_field;
typedef struct wmap_batch wmap_batch;

WMAP_API const char* wmap_version(void);
WMAP_API const char* wmap_last_error(void);
WMAP_API const char* wmap_status_name(wmap_status status);

/* Coefficient space */
WMAP_API wmap_status wmap_besov_norm(double s, double p, int d, const double* u, size_t n, double* out);
WMAP_API wmap_status wmap_weighted_inner(const double* u, const double* v, const double* weights, size_t n,
                                         double* out);

/* Priors */
WMAP_API wmap_status wmap_prior_gaussian(const double* cm_weights, size_t n, wmap_prior** out);
WMAP_API wmap_status wmap_prior_besov(double s, double p, int d, size_t n, wmap_prior** out);
WMAP_API wmap_status wmap_prior_hierarchical(const double* cov_weights, const double* mean, size_t n,
                                             double rho_variance, wmap_prior** out);
WMAP_API void wmap_prior_destroy(wmap_prior* prior);
WMAP_API size_t wmap_prior_trunc(const wmap_prior* prior);
WMAP_API size_t wmap_prior_dim(const wmap_prior* prior);
WMAP_API wmap_status wmap_prior_log_density(const wmap_prior* prior, const double* x, size_t dim, double* out);
WMAP_API wmap_status wmap_prior_log_deriv(const wmap_prior* prior, const double* x, const double* h, size_t dim,
                                          double* out);
WMAP_API wmap_status wmap_prior_J(const wmap_prior* prior, const double* x, size_t dim, double* out);
WMAP_API wmap_status wmap_prior_J_grad_dir(const wmap_prior* prior, const double* x, const double* h, size_t dim,
                                           double* out);
WMAP_API wmap_status wmap_prior_sample(const wmap_prior* prior, uint64_t seed, size_t count, unsigned threads,
                                       wmap_batch** out);
WMAP_API wmap_status wmap_fisher_information(double p, double* out);

/* Posterior for m = A u + e, unit Gaussian noise. a is m_rows x n, row-major. */
WMAP_API wmap_status wmap_posterior_create(const wmap_prior* prior, const double* a, size_t m_rows, size_t n,
                                           const double* data, wmap_posterior** out);
WMAP_API void wmap_posterior_destroy(wmap_posterior* post);
WMAP_API size_t wmap_posterior_dim(const wmap_posterior* post);
WMAP_API wmap_status wmap_posterior_log_density(const wmap_posterior* post, const double* x, size_t dim,
                                                double* out);
WMAP_API wmap_status wmap_posterior_log_deriv(const wmap_posterior* post, const double* x, const double* h,
                                              size_t dim, double* out);

/* Sampling */
WMAP_API wmap_status wmap_sample_posterior_is(const wmap_posterior* post, uint64_t seed, size_t count,
                                              unsigned threads, wmap_batch** out);
WMAP_API wmap_status wmap_sample_posterior_rwm(const wmap_posterior* post, uint64_t seed, size_t count,
                                               double step_size, size_t burn_in, size_t thin, wmap_batch** out);
WMAP_API void wmap_batch_destroy(wmap_batch* batch);
WMAP_API size_t wmap_batch_size(const wmap_batch* batch);
WMAP_API size_t wmap_batch_dim(const wmap_batch* batch);
/* Copies draws into out (dim * size doubles, one draw after another). */
WMAP_API wmap_status wmap_batch_draws(const wmap_batch* batch, double* out);
WMAP_API double wmap_batch_ess(const wmap_batch* batch);
/* Negative when the batch is not a Metropolis chain. */
WMAP_API double wmap_batch_acceptance_rate(const wmap_batch* batch);
/* stderr_out may be NULL. */
WMAP_API wmap_status wmap_cm_estimate(const wmap_batch* batch, double* out, double* stderr_out);
WMAP_API wmap_status wmap_small_ball_prob(const wmap_posterior* post, const double* center, size_t dim,
                                          double eps, const wmap_batch* batch, double* estimate,
                                          double* std_error, int* no_hits);

/* Translation densities, on a prior or posterior field */
WMAP_API wmap_status wmap_field_from_prior(const wmap_prior* prior, wmap_field** out);
WMAP_API wmap_status wmap_field_from_posterior(const wmap_posterior* post, wmap_field** out);
WMAP_API void wmap_field_destroy(wmap_field* field);
WMAP_API wmap_status wmap_om_ratio_quadrature(const wmap_field* field, const double* u, const double* h,
                                              size_t dim, size_t nodes, double* out);
WMAP_API wmap_status wmap_om_ratio_exact(const wmap_field* field, const double* u, const double* h, size_t dim,
                                         double* out);
WMAP_API wmap_status wmap_optimality_residual(const wmap_field* field, const double* u, size_t dim, double* out);

/* Solvers */
typedef struct wmap_solve_options {
  int max_iter;
  double grad_tol;
  double shrink;
  double sufficient_decrease;
  int force_iterative;
  const double* initial_point; /* NULL for zero; length dim */
} wmap_solve_options;

typedef struct wmap_solve_result {
  double objective;
  double residual;
  int iterations;
  int converged;
} wmap_solve_result;

typedef struct wmap_verification {
  double max_coordinate_residual;
  double max_ratio;
  double min_perturbation_gap;
  int residual_passed;
  int ratio_passed;
  int perturbation_passed;
} wmap_verification;

WMAP_API void wmap_solve_options_default(wmap_solve_options* opts);
/* Writes the minimiser to argmin (length dim). Returns WMAP_ERR_NOT_CONVERGED,
 * with argmin and result still filled, when the residual stays above grad_tol. */
WMAP_API wmap_status wmap_solve(const wmap_posterior* post, const wmap_solve_options* opts, double* argmin,
                                wmap_solve_result* result);
WMAP_API wmap_status wmap_verify_solution(const wmap_posterior* post, const double* argmin, size_t dim,
                                          size_t n_directions, uint64_t seed, double tol,
                                          wmap_verification* out);

/* Bregman distances and Bayes costs */
typedef struct wmap_cost_report {
  double cost_map;
  double cost_map_stderr;
  double cost_cm;
  double cost_cm_stderr;
  double paired_diff;
  double paired_diff_stderr;
  uint64_t shared_seed;
  size_t n_samples;
  int map_leq_cm;
} wmap_cost_report;

WMAP_API wmap_status wmap_bregman(const wmap_prior* prior, const double* u, const double* v, size_t dim,
                                  double* out);
WMAP_API wmap_status wmap_bregman_hom(const wmap_prior* prior, const double* u, const double* v, size_t dim,
                                      double* out);
WMAP_API wmap_status wmap_bayes_cost(const wmap_posterior* post, const double* u, size_t dim,
                                     const wmap_batch* batch, double* estimate, double* std_error);
WMAP_API wmap_status wmap_compare_map_cm(const wmap_posterior* post, const double* u_map, const double* u_cm,
                                         size_t dim, const wmap_batch* batch, wmap_cost_report* out);

/* Experiment runner */
typedef struct wmap_run_options {
  const char* out_dir; /* NULL for the current directory */
  int write_csv;
  int write_json;
  unsigned threads;
} wmap_run_options;

WMAP_API void wmap_run_options_default(wmap_run_options* opts);
/* Parse errors give WMAP_ERR_PARSE, invalid configs WMAP_ERR_VALIDATION and
 * failed tasks (including non-convergence, after writing the report)
 * WMAP_ERR_TASK_FAILED or WMAP_ERR_IO. */
WMAP_API wmap_status wmap_run_experiment(const char* config_path, const wmap_run_options* opts);

#ifdef __cplusplus
}
#endif

#endif /* WMAP_WMAP_H */
