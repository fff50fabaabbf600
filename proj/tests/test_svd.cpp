#include "doctest.h"

#include "malps/svd.hpp"
#include "oracles.hpp"
#include "test_helpers.hpp"

using namespace malps;

TEST_CASE("svd of the zero matrix") {
  const SvdFactors f = svd(DenseMatrix::Zero(3, 2));
  REQUIRE(f.sigma.size() == 2);
  CHECK(f.sigma[0] == 0.0);
  CHECK(f.sigma[1] == 0.0);
}

TEST_CASE("svd of a diagonal matrix returns its entries") {
  DenseMatrix X = DenseMatrix::Zero(3, 3);
  X(0, 0) = 3.0;
  X(1, 1) = 2.0;
  X(2, 2) = 1.0;
  const SvdFactors f = svd(X);
  CHECK(f.sigma[0] == doctest::Approx(3.0).epsilon(1e-12));
  CHECK(f.sigma[1] == doctest::Approx(2.0).epsilon(1e-12));
  CHECK(f.sigma[2] == doctest::Approx(1.0).epsilon(1e-12));
  CHECK((f.U - Eigen::MatrixXd::Identity(3, 3)).cwiseAbs().maxCoeff() < 1e-12);
  CHECK((f.V - Eigen::MatrixXd::Identity(3, 3)).cwiseAbs().maxCoeff() < 1e-12);
}

TEST_CASE("singular values match the Jacobi eigensolver oracle on X^T X") {
  const DenseMatrix X = testutil::random_matrix(4, 4, 11);
  const Eigen::MatrixXd G = X.transpose() * X;
  oracles::Mat a(4, std::vector<double>(4));
  for (int i = 0; i < 4; ++i)
    for (int j = 0; j < 4; ++j) a[i][j] = G(i, j);
  const auto eig = oracles::jacobi_eigen(a);
  const SvdFactors f = svd(X);
  for (int i = 0; i < 4; ++i) {
    CHECK(f.sigma[i] ==
          doctest::Approx(std::sqrt(std::max(0.0, eig.values[i]))).epsilon(1e-8));
  }
}

TEST_CASE("svd rejects non-finite input") {
  DenseMatrix X = DenseMatrix::Zero(2, 2);
  X(0, 1) = std::numeric_limits<double>::quiet_NaN();
  CHECK_THROWS_AS(svd(X), std::invalid_argument);
}

TEST_CASE("svd round trip on assorted shapes") {
  for (std::uint64_t seed : {1u, 2u, 3u}) {
    for (auto [m, n] : {std::pair<Index, Index>{6, 4}, {4, 6}, {5, 5}, {1, 7}}) {
      const DenseMatrix X = testutil::random_matrix(m, n, seed * 100 + m);
      const SvdFactors f = svd(X);
      REQUIRE(f.sigma.size() == std::min(m, n));
      for (Index i = 0; i + 1 < f.sigma.size(); ++i) {
        CHECK(f.sigma[i] >= f.sigma[i + 1]);
      }
      const DenseMatrix back = f.U * f.sigma.asDiagonal() * f.V.transpose();
      CHECK((back - X).norm() <= 1e-8 * std::max(1.0, X.norm()));
    }
  }
}

TEST_CASE("best_rank_k keeps a matrix that already has rank <= k") {
  const DenseMatrix X = testutil::random_rank_k(6, 5, 2, 7);
  const auto [basis, approx] = best_rank_k(X, 2);
  CHECK((approx - X).norm() <= 1e-10 * X.norm());
  CHECK(basis.rank() == 2);
  CHECK(basis.strict_orthonormal);
}

TEST_CASE("best_rank_k of diag(3,2,1) at k=2") {
  DenseMatrix X = DenseMatrix::Zero(3, 3);
  X(0, 0) = 3.0;
  X(1, 1) = 2.0;
  X(2, 2) = 1.0;
  const auto [basis, approx] = best_rank_k(X, 2);
  DenseMatrix expect = X;
  expect(2, 2) = 0.0;
  CHECK((approx - expect).norm() < 1e-12);
}

TEST_CASE("rank-1 truncation matches the power-iteration oracle") {
  const DenseMatrix X = testutil::random_matrix(5, 4, 21);
  const Eigen::MatrixXd G = X.transpose() * X;
  oracles::Mat a(4, std::vector<double>(4));
  for (int i = 0; i < 4; ++i)
    for (int j = 0; j < 4; ++j) a[i][j] = G(i, j);
  const auto v_raw = oracles::dominant_eigvec(a, 1e-10);
  Eigen::VectorXd v(4);
  for (int i = 0; i < 4; ++i) v[i] = v_raw[i];
  Eigen::VectorXd xv = X * v;
  const double sigma = xv.norm();
  const Eigen::VectorXd u = xv / sigma;
  const DenseMatrix oracle = sigma * u * v.transpose();

  const auto [basis, approx] = best_rank_k(X, 1);
  CHECK((approx - oracle).norm() <= 1e-8 * sigma);
}

TEST_CASE("best_rank_k rejects out-of-range k") {
  const DenseMatrix X = testutil::random_matrix(3, 4, 5);
  CHECK_THROWS_AS(best_rank_k(X, 4), std::invalid_argument);
  CHECK_THROWS_AS(best_rank_k(X, 0), std::invalid_argument);
}
