#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>

#include "test_util.hpp"
#include "vlmd/sparse.hpp"

using namespace vlmd;

namespace {

// Independent route to the same minimizer: proximal gradient (ISTA) on
// ||x - Z a||^2 + lambda |a|_1, fixed step 1 / (2 * largest eigenvalue of
// Z^T Z). Shares nothing with the coordinate-descent implementation.
Matrix ista_solve(const Matrix& X, const Matrix& Z, double lambda,
                  int max_iter = 2000000, double kkt_tol = 1e-11) {
  const Matrix G = Z.transpose() * Z;
  const Matrix ZtX = Z.transpose() * X;
  Eigen::SelfAdjointEigenSolver<Matrix> es(G);
  const double lip = 2.0 * es.eigenvalues().maxCoeff();
  const double step = 1.0 / lip;

  Matrix A = Matrix::Zero(Z.cols(), X.cols());
  for (int it = 0; it < max_iter; ++it) {
    const Matrix grad = 2.0 * (G * A - ZtX);
    Matrix next = A - step * grad;
    const double thresh = step * lambda;
    for (Eigen::Index i = 0; i < next.size(); ++i) {
      double& v = next.data()[i];
      v = v > thresh ? v - thresh : (v < -thresh ? v + thresh : 0.0);
    }
    A = next;

    // subgradient optimality residual
    const Matrix g = ZtX - G * A;
    double kkt = 0.0;
    for (Eigen::Index c = 0; c < A.cols(); ++c) {
      for (Eigen::Index l = 0; l < A.rows(); ++l) {
        const double grad2 = 2.0 * g(l, c);
        const double viol =
            A(l, c) == 0.0
                ? std::max(0.0, std::abs(grad2) - lambda)
                : std::abs(grad2 - lambda * (A(l, c) > 0 ? 1.0 : -1.0));
        kkt = std::max(kkt, viol);
      }
    }
    if (kkt <= kkt_tol) break;
  }
  return A;
}

double kkt_residual(const Matrix& X, const Matrix& Z, const Matrix& A,
                    double lambda) {
  const Matrix g = Z.transpose() * (X - Z * A);
  double kkt = 0.0;
  for (Eigen::Index c = 0; c < A.cols(); ++c) {
    for (Eigen::Index l = 0; l < A.rows(); ++l) {
      const double grad2 = 2.0 * g(l, c);
      const double viol =
          A(l, c) == 0.0
              ? std::max(0.0, std::abs(grad2) - lambda)
              : std::abs(grad2 - lambda * (A(l, c) > 0 ? 1.0 : -1.0));
      kkt = std::max(kkt, viol);
    }
  }
  return kkt;
}

}  // namespace

TEST_CASE("lambda 0 with a square invertible dictionary is a linear solve") {
  const Matrix Z = testutil::random_matrix(6, 6, 11) +
                   6.0 * Matrix::Identity(6, 6);  // well conditioned
  const Matrix A_true = testutil::random_matrix(6, 2, 12);
  const Matrix X = Z * A_true;
  const Matrix A = lasso_solve(X, Z, 0.0, nullptr, 1e-12, 20000);
  CHECK((A - A_true).cwiseAbs().maxCoeff() < 1e-8);
}

TEST_CASE("lambda at the critical value zeroes the solution exactly") {
  const Matrix Z = testutil::random_matrix(16, 3, 21);
  const Matrix X = testutil::random_matrix(16, 2, 22);
  const double lambda_max = 2.0 * (Z.transpose() * X).cwiseAbs().maxCoeff();
  SUBCASE("at lambda_max") {
    const Matrix A = lasso_solve(X, Z, lambda_max);
    CHECK(A.cwiseAbs().maxCoeff() == 0.0);
  }
  SUBCASE("above lambda_max") {
    const Matrix A = lasso_solve(X, Z, 1.5 * lambda_max);
    CHECK(A.cwiseAbs().maxCoeff() == 0.0);
  }
  SUBCASE("slightly below lambda_max the solution is nonzero") {
    const Matrix A = lasso_solve(X, Z, 0.9 * lambda_max);
    CHECK(A.cwiseAbs().maxCoeff() > 0.0);
  }
}

TEST_CASE("small instance agrees with the proximal-gradient oracle") {
  // T=8, L=2, C=1, lambda=0.1, frozen fixture
  Matrix Z(8, 2);
  Z << 0.31, -0.74, 0.92, 0.44, -0.55, 0.18, 0.27, -0.61, 0.83, 0.05, -0.12,
      0.96, 0.40, -0.33, -0.78, 0.29;
  Matrix X(8, 1);
  X << 0.52, 1.10, -0.41, -0.22, 0.77, 0.65, 0.12, -0.55;
  const double lambda = 0.1;

  const Matrix oracle = ista_solve(X, Z, lambda);
  const Matrix A = lasso_solve(X, Z, lambda, nullptr, 1e-12, 20000);
  CHECK((A - oracle).cwiseAbs().maxCoeff() < 1e-6);
  CHECK(kkt_residual(X, Z, A, lambda) < 1e-10);
}

TEST_CASE("random instances satisfy the KKT certificate and match ISTA") {
  for (std::uint64_t seed : {101, 202, 303}) {
    const Matrix Z = testutil::random_matrix(32, 4, seed);
    const Matrix X = testutil::random_matrix(32, 3, seed + 1);
    const double lambda = 0.8;
    const Matrix A = lasso_solve(X, Z, lambda, nullptr, 1e-12, 50000);
    CHECK(kkt_residual(X, Z, A, lambda) < 1e-10);
    const Matrix oracle = ista_solve(X, Z, lambda);
    CHECK((A - oracle).cwiseAbs().maxCoeff() < 1e-6);
  }
}

TEST_CASE("objective never increases across sweeps") {
  const Matrix Z = testutil::random_matrix(24, 5, 404);
  const Matrix X = testutil::random_matrix(24, 2, 405);
  const double lambda = 0.5;
  double prev = lasso_objective(X, Z, Matrix::Zero(5, 2), lambda);
  for (int sweeps = 1; sweeps <= 8; ++sweeps) {
    const Matrix A = lasso_solve(X, Z, lambda, nullptr, 1e-15, sweeps);
    const double obj = lasso_objective(X, Z, A, lambda);
    CHECK(obj <= prev + 1e-12);
    prev = obj;
  }
}

TEST_CASE("channels solve independently") {
  const Matrix Z = testutil::random_matrix(20, 3, 500);
  const Matrix X = testutil::random_matrix(20, 4, 501);
  const Matrix joint = lasso_solve(X, Z, 0.3, nullptr, 1e-12, 20000);
  for (int c = 0; c < 4; ++c) {
    const Matrix single = lasso_solve(X.col(c), Z, 0.3, nullptr, 1e-12, 20000);
    // last-ulp drift only: Z^T X goes through different product kernels
    CHECK((joint.col(c) - single).cwiseAbs().maxCoeff() < 1e-14);
  }
}

TEST_CASE("zero-energy atoms keep their warm-start value and are flagged") {
  Matrix Z = testutil::random_matrix(12, 3, 600);
  Z.col(1).setZero();
  const Matrix X = testutil::random_matrix(12, 2, 601);
  Matrix warm = Matrix::Zero(3, 2);
  warm(1, 0) = 0.7;
  LassoReport rep;
  const Matrix A = lasso_solve(X, Z, 0.2, &warm, 1e-10, 5000, &rep);
  CHECK(A(1, 0) == 0.7);
  CHECK(A(1, 1) == 0.0);
  REQUIRE(rep.degenerate_atoms.size() == 1);
  CHECK(rep.degenerate_atoms[0] == 1);

  // cold start leaves the minimum-norm value 0, lambda = 0 included
  const Matrix A0 = lasso_solve(X, Z, 0.0, nullptr, 1e-10, 5000);
  CHECK(A0(1, 0) == 0.0);
  CHECK(A0(1, 1) == 0.0);
}

TEST_CASE("warm start reaches the same minimizer") {
  const Matrix Z = testutil::random_matrix(30, 4, 700);
  const Matrix X = testutil::random_matrix(30, 2, 701);
  const Matrix cold = lasso_solve(X, Z, 0.6, nullptr, 1e-12, 50000);
  Matrix warm_init = testutil::random_matrix(4, 2, 702);
  const Matrix warm = lasso_solve(X, Z, 0.6, &warm_init, 1e-12, 50000);
  CHECK((cold - warm).cwiseAbs().maxCoeff() < 1e-9);
}

TEST_CASE("rescale_columns matches the pinned examples") {
  SUBCASE("column exceeding the box is scaled onto it") {
    Matrix A(2, 1);
    A << 2.0, -1.0;
    const Matrix R = rescale_columns(A);
    CHECK(R(0, 0) == doctest::Approx(1.0));
    CHECK(R(1, 0) == doctest::Approx(-0.5));
  }
  SUBCASE("column already inside the box is untouched") {
    Matrix A(2, 1);
    A << 0.3, -0.9;
    const Matrix R = rescale_columns(A);
    CHECK((R - A).cwiseAbs().maxCoeff() == 0.0);
  }
  SUBCASE("negative peak governs the scale") {
    Matrix A(2, 1);
    A << 0.5, -4.0;
    const Matrix R = rescale_columns(A);
    CHECK(R(0, 0) == doctest::Approx(0.125));
    CHECK(R(1, 0) == doctest::Approx(-1.0));
  }
}

TEST_CASE("rescale_columns is idempotent") {
  const Matrix A = 3.0 * testutil::random_matrix(4, 5, 800);
  const Matrix once = rescale_columns(A);
  const Matrix twice = rescale_columns(once);
  CHECK((once - twice).cwiseAbs().maxCoeff() == 0.0);
  CHECK(once.cwiseAbs().maxCoeff() <= 1.0);
}

TEST_CASE("lasso argument validation") {
  const Matrix Z = Matrix::Zero(4, 2);
  const Matrix X = Matrix::Zero(5, 1);
  CHECK_THROWS_AS(lasso_solve(X, Z, 0.1), DimensionError);
  CHECK_THROWS_AS(lasso_solve(Matrix::Zero(4, 1), Z, -1.0), ConfigError);
}
