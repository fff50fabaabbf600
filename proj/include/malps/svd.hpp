#pragma once

#include <utility>

#include "malps/subspace.hpp"
#include "malps/types.hpp"

namespace malps {

// Thin SVD with l = min(m, n) triplets, singular values nonincreasing.
// Throws std::invalid_argument on non-finite entries.
SvdFactors svd(const DenseMatrix& X);

// Best rank-k approximation (truncated SVD). Returns the spanning basis
// {u_i v_i^T, i <= k} and the matrix U_k Sigma_k V_k^T.
// Throws std::invalid_argument when k < 1 or k > min(m, n).
std::pair<SubspaceBasis, DenseMatrix> best_rank_k(const DenseMatrix& X, Index k);

}  // namespace malps
