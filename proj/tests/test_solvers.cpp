#include <doctest.h>

#include <cmath>

#include "support.hpp"
#include "wmap/error.hpp"
#include "wmap/fomin.hpp"
#include "wmap/solvers.hpp"

using namespace wmap;

namespace {

Vector tikhonov(const Matrix& a, const Vector& q, const Vector& m) {
  return (a.transpose() * a + Matrix(q.asDiagonal())).fullPivLu().solve(a.transpose() * m);
}

// Minimiser of 1/2|Au - m|^2 + 1/2 |L x|_Q^2 + t^2 / (2 rho) with L x = u - t e,
// assembled from the factorised quadratic form.
Vector hierarchicalOracle(const Matrix& a, const Vector& q, const Vector& e, double rho, const Vector& m) {
  const auto n = a.cols();
  Matrix l(n, n + 1);
  l << Matrix::Identity(n, n), -e;
  Matrix b = Matrix::Zero(a.rows(), n + 1);
  b.leftCols(n) = a;
  Matrix h = b.transpose() * b + l.transpose() * q.asDiagonal() * l;
  h(n, n) += 1.0 / rho;
  return h.fullPivLu().solve(b.transpose() * m);
}

}  // namespace

TEST_SUITE("solvers") {
  TEST_CASE("option validation") {
    SolveOptions o;
    CHECK_NOTHROW(o.validate());
    o.gradTol = 0.0;
    CHECK_THROWS_AS(o.validate(), Error);
    o = {};
    o.lineSearch.shrink = 1.0;
    CHECK_THROWS_AS(o.validate(), Error);
    o = {};
    o.lineSearch.sufficientDecrease = 0.6;
    CHECK_THROWS_AS(o.validate(), Error);
    o = {};
    o.maxIter = -1;
    CHECK_THROWS_AS(o.validate(), Error);
  }

  TEST_CASE("closed-form examples") {
    const PosteriorModel gauss(PriorModel::whiteNoise(1), ForwardOperator(Matrix::Ones(1, 1)), Vector::Constant(1, 2.0));
    const auto r = solveWmap(gauss);
    CHECK(r.argmin[0] == doctest::Approx(1.0).epsilon(1e-14));
    CHECK(r.residual <= 1e-10);
    CHECK(r.converged);

    const PosteriorModel hier(PriorModel::hierarchical(Vector::Ones(1), Vector::Ones(1), 1.0),
                              ForwardOperator(Matrix::Ones(1, 1)), Vector::Constant(1, 3.0));
    const auto rh = solveWmap(hier);
    CHECK(std::abs(rh.argmin[0] - 2.0) <= 1e-10);
    CHECK(std::abs(rh.argmin[1] - 1.0) <= 1e-10);
    CHECK(rh.converged);
  }

  TEST_CASE("zero data gives the prior mode") {
    Rng rng(51, 0);
    for (auto family : wmt::kFamilies) {
      const auto prior = wmt::randomPrior(rng, family, 5);
      const PosteriorModel post(prior, ForwardOperator(wmt::randomMatrix(rng, 3, 5)), Vector::Zero(3));
      const auto r = solveWmap(post);
      CHECK(r.converged);
      CHECK(r.argmin.values().cwiseAbs().maxCoeff() <= 1e-12);
    }
  }

  TEST_CASE("random linear-gaussian problems match the normal equations") {
    Rng rng(52, 0);
    for (int trial = 0; trial < 20; ++trial) {
      const std::size_t n = 1 + static_cast<std::size_t>(rng.uniform() * 32);
      const std::size_t m = 1 + static_cast<std::size_t>(rng.uniform() * 20);
      const auto post = wmt::randomPosterior(rng, PriorFamily::GaussianDiag, n, m);
      const Vector exact = tikhonov(post.op().matrix(), post.prior().gaussian()->cmWeights, post.data());
      const auto r = solveWmap(post);
      CHECK((r.argmin.values() - exact).cwiseAbs().maxCoeff() <= 1e-7);
      CHECK(r.residual <= 1e-8);
    }
  }

  TEST_CASE("random hierarchical problems match the joint normal equations") {
    Rng rng(53, 0);
    for (int trial = 0; trial < 20; ++trial) {
      const std::size_t n = 1 + static_cast<std::size_t>(rng.uniform() * 16);
      const auto post = wmt::randomPosterior(rng, PriorFamily::Hierarchical, n, 6);
      const auto* hp = post.prior().hierarchicalParams();
      const Vector exact = hierarchicalOracle(post.op().matrix(), hp->covWeights, hp->mean, hp->rhoVariance, post.data());
      const auto r = solveWmap(post);
      CHECK((r.argmin.values() - exact).cwiseAbs().maxCoeff() <= 1e-7);
      CHECK(r.residual <= 1e-8);
    }
  }

  TEST_CASE("iterative path agrees with the direct solves") {
    Rng rng(54, 0);
    for (auto family : {PriorFamily::GaussianDiag, PriorFamily::Hierarchical}) {
      for (int trial = 0; trial < 5; ++trial) {
        const auto post = wmt::randomPosterior(rng, family, 6, 4);
        SolveOptions o;
        o.gradTol = 1e-10;
        const auto direct = solveWmap(post, o);
        o.method = SolveMethod::Iterative;
        const auto iter = solveWmap(post, o);
        CHECK(iter.converged);
        CHECK((iter.argmin.values() - direct.argmin.values()).cwiseAbs().maxCoeff() <= 1e-7);
      }
    }
  }

  TEST_CASE("besov descent is monotone and unique") {
    Rng rng(55, 0);
    for (int trial = 0; trial < 8; ++trial) {
      const auto post = wmt::randomPosterior(rng, PriorFamily::Besov, 12, 8);
      SolveOptions o;
      o.recordHistory = true;
      const auto a = solveWmap(post, o);
      CHECK(a.converged);
      CHECK(a.residual <= 1e-8);
      CHECK(a.residual == doctest::Approx(optimalityResidual(PosteriorField(post), a.argmin)));
      for (std::size_t k = 1; k < a.objectiveHistory.size(); ++k)
        CHECK(a.objectiveHistory[k] <= a.objectiveHistory[k - 1] + 1e-12 * std::abs(a.objectiveHistory[k - 1]));
      o.initialPoint = CoeffVec(wmt::randomState(rng, post.prior(), 5.0));
      const auto b = solveWmap(post, o);
      CHECK(b.converged);
      CHECK((a.argmin.values() - b.argmin.values()).cwiseAbs().maxCoeff() <= 1e-6);
    }
  }

  TEST_CASE("objective is convex") {
    Rng rng(56, 0);
    for (auto family : wmt::kFamilies) {
      for (int trial = 0; trial < 100; ++trial) {
        const auto post = wmt::randomPosterior(rng, family, 4, 3);
        const Vector u = wmt::randomState(rng, post.prior(), 2.0);
        const Vector v = wmt::randomState(rng, post.prior(), 2.0);
        const double mid = post.objective(0.5 * (u + v));
        CHECK(mid <= std::max(post.objective(u), post.objective(v)) + 1e-12);
        CHECK(mid <= 0.5 * (post.objective(u) + post.objective(v)) + 1e-12 * (1 + std::abs(mid)));
      }
    }
  }

  TEST_CASE("non-convergence is reported") {
    Rng rng(57, 0);
    const auto post = wmt::randomPosterior(rng, PriorFamily::Besov, 20, 10);
    SolveOptions o;
    o.maxIter = 2;
    const auto r = solveWmap(post, o);
    CHECK_FALSE(r.converged);
    CHECK(r.residual > o.gradTol);
    CHECK(r.iterations == 2);
    CHECK_THROWS_AS(solveWmap(post, SolveOptions{.initialPoint = CoeffVec{1.0}}), Error);
  }

  TEST_CASE("verification report") {
    Matrix a(2, 2);
    a << 1.0, 0.4, 0.2, 1.5;
    Vector m(2);
    m << 0.5, -1.0;
    const PosteriorModel post(PriorModel::gaussianDiag(Vector::Constant(2, 2.0)), ForwardOperator(a), m);
    const auto r = solveWmap(post);
    const auto rep = verifySolution(post, r, VerifyOptions{10, 3, 1e-8, 1e-3});
    CHECK(rep.passed());
    CHECK(rep.directions.size() == 14);
    CHECK(rep.perturbationsChecked == 10);
    CHECK(rep.maxRatio <= 1.0 + 1e-8);

    SolveResult moved = r;
    moved.argmin = r.argmin + 0.1 * CoeffVec::basis(1, 2);
    const auto bad = verifySolution(post, moved);
    CHECK_FALSE(bad.residualPassed);
    CHECK_FALSE(bad.passed());

    const auto coordsOnly = verifySolution(post, r, VerifyOptions{0, 3, 1e-8, 1e-3});
    CHECK(coordsOnly.directions.size() == 4);
    CHECK(coordsOnly.perturbationsChecked == 0);
    CHECK(coordsOnly.passed());
  }

  TEST_CASE("refinement study") {
    const auto family = [](std::size_t n) {
      Matrix a(3, static_cast<Eigen::Index>(n));
      for (Eigen::Index j = 0; j < a.cols(); ++j) {
        Rng rng(99, static_cast<std::uint64_t>(j));
        for (Eigen::Index i = 0; i < 3; ++i) a(i, j) = rng.normal() * std::pow(double(j + 1), -2.0);
      }
      Vector m(3);
      m << 1.0, -0.5, 0.25;
      Vector q(static_cast<Eigen::Index>(n));
      for (Eigen::Index j = 0; j < q.size(); ++j) q[j] = double(j + 1);
      return PosteriorModel(PriorModel::gaussianDiag(q), ForwardOperator(a), m);
    };
    const auto norm = [](const CoeffVec& d) { return d.values().norm(); };
    const auto rows = refinementStudy(family, {4, 8, 16, 32}, {}, norm);
    REQUIRE(rows.size() == 4);
    CHECK_FALSE(rows[0].diffNorm.has_value());
    for (std::size_t i = 2; i < rows.size(); ++i) CHECK(*rows[i].diffNorm < *rows[i - 1].diffNorm);
    CHECK(rows[3].trunc == 32);

    const auto single = refinementStudy(family, {5}, {}, norm);
    REQUIRE(single.size() == 1);
    CHECK_FALSE(single[0].diffNorm.has_value());
    CHECK_THROWS_AS(refinementStudy(family, {8, 8}, {}, norm), Error);
    CHECK_THROWS_AS(refinementStudy(family, {}, {}, norm), Error);

    SolveOptions strict;
    strict.method = SolveMethod::Iterative;
    strict.maxIter = 1;
    CHECK_THROWS_AS(refinementStudy(family, {4, 8}, strict, norm), Error);
  }
}
