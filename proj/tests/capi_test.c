/* Exercises the C interface from plain C. */
#include <math.h>
#include <stdio.h>
#include <stdlib.h>

#include "wmap/wmap.h"

static int failures = 0;

#define EXPECT(cond)                                                  \
  do {                                                                \
    if (!(cond)) {                                                    \
      fprintf(stderr, "%s:%d: expected %s\n", __FILE__, __LINE__, #cond); \
      ++failures;                                                     \
    }                                                                 \
  } while (0)

#define NEAR(a, b, tol) EXPECT(fabs((a) - (b)) <= (tol))

int main(void) {
  double out = 0.0;
  const double u2[2] = {1.0, 1.0};
  const double ones[2] = {1.0, 4.0};

  EXPECT(wmap_besov_norm(1.0, 2.0, 1, u2, 2, &out) == WMAP_OK);
  NEAR(out, sqrt(5.0), 1e-14);
  EXPECT(wmap_weighted_inner(u2, u2, ones, 2, &out) == WMAP_OK);
  NEAR(out, 5.0, 1e-14);
  EXPECT(wmap_besov_norm(1.0, 3.0, 1, u2, 2, &out) == WMAP_ERR_INVALID_ARGUMENT);
  EXPECT(wmap_last_error()[0] != '\0');
  EXPECT(wmap_fisher_information(2.0, &out) == WMAP_OK);
  NEAR(out, 2.0, 1e-10);

  /* gauss-1d: A = [1], m = 2, white noise */
  wmap_prior* white = NULL;
  const double w1[1] = {1.0};
  EXPECT(wmap_prior_gaussian(w1, 1, &white) == WMAP_OK);
  EXPECT(wmap_prior_dim(white) == 1);
  const double zero[1] = {0.0};
  EXPECT(wmap_prior_log_density(white, zero, 1, &out) == WMAP_OK);
  NEAR(out, -0.9189385332046727, 1e-14);
  EXPECT(wmap_prior_log_density(white, u2, 2, &out) == WMAP_ERR_DIMENSION);

  wmap_posterior* post = NULL;
  const double a[1] = {1.0};
  const double m[1] = {2.0};
  EXPECT(wmap_posterior_create(white, a, 1, 1, m, &post) == WMAP_OK);
  wmap_solve_options opts;
  wmap_solve_options_default(&opts);
  wmap_solve_result res;
  double uhat[1] = {0.0};
  EXPECT(wmap_solve(post, &opts, uhat, &res) == WMAP_OK);
  NEAR(uhat[0], 1.0, 1e-12);
  EXPECT(res.converged == 1);
  wmap_verification ver;
  EXPECT(wmap_verify_solution(post, uhat, 1, 5, 1, 1e-8, &ver) == WMAP_OK);
  EXPECT(ver.residual_passed && ver.ratio_passed && ver.perturbation_passed);

  wmap_field* field = NULL;
  EXPECT(wmap_field_from_prior(white, &field) == WMAP_OK);
  const double h1[1] = {1.0};
  double q = 0.0, e = 0.0;
  EXPECT(wmap_om_ratio_quadrature(field, zero, h1, 1, 64, &q) == WMAP_OK);
  EXPECT(wmap_om_ratio_exact(field, zero, h1, 1, &e) == WMAP_OK);
  NEAR(q, exp(-0.5), 1e-14);
  NEAR(e, exp(-0.5), 1e-14);
  wmap_field_destroy(field);

  wmap_batch* batch = NULL;
  EXPECT(wmap_sample_posterior_is(post, 3, 20000, 1, &batch) == WMAP_OK);
  EXPECT(wmap_batch_size(batch) == 20000);
  double cm[1], se[1];
  EXPECT(wmap_cm_estimate(batch, cm, se) == WMAP_OK);
  EXPECT(fabs(cm[0] - 1.0) <= 4 * se[0]);
  double ball = 0.0, ballSe = 0.0;
  int noHits = 1;
  EXPECT(wmap_small_ball_prob(post, uhat, 1, 1e6, batch, &ball, &ballSe, &noHits) == WMAP_OK);
  NEAR(ball, 1.0, 1e-12);
  EXPECT(noHits == 0);
  wmap_cost_report cost;
  EXPECT(wmap_compare_map_cm(post, uhat, cm, 1, batch, &cost) == WMAP_OK);
  EXPECT(cost.n_samples == 20000);
  EXPECT(fabs(cost.paired_diff) <= 3 * cost.paired_diff_stderr + 1e-12);
  wmap_batch_destroy(batch);

  EXPECT(wmap_sample_posterior_rwm(post, 3, 5000, 0.8, 500, 1, &batch) == WMAP_OK);
  EXPECT(wmap_batch_acceptance_rate(batch) > 0.1);
  wmap_batch_destroy(batch);

  const double two[1] = {2.0};
  EXPECT(wmap_bregman(white, two, zero, 1, &out) == WMAP_OK);
  NEAR(out, 2.0, 1e-14);

  /* hier-1d */
  wmap_prior* hier = NULL;
  EXPECT(wmap_prior_hierarchical(w1, w1, 1, 1.0, &hier) == WMAP_OK);
  EXPECT(wmap_prior_dim(hier) == 2);
  wmap_posterior* hpost = NULL;
  const double m3[1] = {3.0};
  EXPECT(wmap_posterior_create(hier, a, 1, 1, m3, &hpost) == WMAP_OK);
  double ut[2];
  EXPECT(wmap_solve(hpost, NULL, ut, NULL) == WMAP_OK);
  NEAR(ut[0], 2.0, 1e-10);
  NEAR(ut[1], 1.0, 1e-10);

  /* non-convergence keeps the iterate */
  wmap_prior* besov = NULL;
  EXPECT(wmap_prior_besov(1.5, 1.5, 1, 4, &besov) == WMAP_OK);
  wmap_posterior* bpost = NULL;
  const double a4[8] = {1, 0.5, 0.2, 0.1, 0.3, 1, 0.4, 0.2};
  const double m2[2] = {1.0, -0.5};
  EXPECT(wmap_posterior_create(besov, a4, 2, 4, m2, &bpost) == WMAP_OK);
  opts.max_iter = 1;
  double ub[4];
  wmap_solve_result bres;
  EXPECT(wmap_solve(bpost, &opts, ub, &bres) == WMAP_ERR_NOT_CONVERGED);
  EXPECT(bres.converged == 0);
  wmap_solve_options_default(&opts);
  EXPECT(wmap_solve(bpost, &opts, ub, &bres) == WMAP_OK);
  EXPECT(bres.residual <= 1e-8);

  EXPECT(wmap_prior_J(NULL, zero, 1, &out) == WMAP_ERR_INVALID_ARGUMENT);
  EXPECT(wmap_run_experiment("/nonexistent/config.json", NULL) == WMAP_ERR_PARSE);

  wmap_posterior_destroy(bpost);
  wmap_prior_destroy(besov);
  wmap_posterior_destroy(hpost);
  wmap_prior_destroy(hier);
  wmap_posterior_destroy(post);
  wmap_prior_destroy(white);

  if (failures) {
    fprintf(stderr, "%d failure(s)\n", failures);
    return EXIT_FAILURE;
  }
  puts("capi ok");
  return EXIT_SUCCESS;
}
