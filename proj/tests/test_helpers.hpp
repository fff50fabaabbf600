#pragma once

#include "malps/rng.hpp"
#include "malps/subspace.hpp"
#include "malps/svd.hpp"
#include "malps/types.hpp"

namespace testutil {

inline malps::DenseMatrix random_matrix(malps::Index m, malps::Index n,
                                        std::uint64_t seed) {
  malps::Rng rng(seed);
  malps::DenseMatrix X(m, n);
  for (malps::Index i = 0; i < m; ++i)
    for (malps::Index j = 0; j < n; ++j) X(i, j) = rng.gaussian();
  return X;
}

inline malps::DenseMatrix random_rank_k(malps::Index m, malps::Index n, int k,
                                        std::uint64_t seed) {
  malps::Rng rng(seed);
  Eigen::MatrixXd L(m, k), R(n, k);
  for (malps::Index i = 0; i < m; ++i)
    for (int j = 0; j < k; ++j) L(i, j) = rng.gaussian();
  for (malps::Index i = 0; i < n; ++i)
    for (int j = 0; j < k; ++j) R(i, j) = rng.gaussian();
  return L * R.transpose();
}

// rank-k basis drawn from the SVD of a random matrix
inline malps::SubspaceBasis random_basis(malps::Index m, malps::Index n, int k,
                                         std::uint64_t seed) {
  return malps::best_rank_k(random_matrix(m, n, seed), k).first;
}

// matrix with prescribed singular values and random orthogonal factors
inline malps::DenseMatrix matrix_with_spectrum(malps::Index m, malps::Index n,
                                               const Eigen::VectorXd& sigma,
                                               std::uint64_t seed) {
  const malps::SvdFactors f = malps::svd(random_matrix(m, n, seed));
  const malps::Index l = std::min<malps::Index>(sigma.size(), f.sigma.size());
  return f.U.leftCols(l) * sigma.head(l).asDiagonal() *
         f.V.leftCols(l).transpose();
}

inline double matrix_rank_tail(const malps::DenseMatrix& X, int k) {
  const malps::SvdFactors f = malps::svd(X);
  double tail = 0.0;
  for (malps::Index i = k; i < f.sigma.size(); ++i) tail += f.sigma[i] * f.sigma[i];
  return std::sqrt(tail);
}

}  // namespace testutil
