#include "malps/svd.hpp"

#include <Eigen/SVD>
#include <stdexcept>

namespace malps {

SvdFactors svd(const DenseMatrix& X) {
  if (X.rows() < 1 || X.cols() < 1) {
    throw std::invalid_argument("svd: matrix must be nonempty");
  }
  if (!X.allFinite()) {
    throw std::invalid_argument("svd: non-finite entries");
  }
  Eigen::MatrixXd A = X;
  Eigen::BDCSVD<Eigen::MatrixXd> dec(A, Eigen::ComputeThinU | Eigen::ComputeThinV);
  return SvdFactors{dec.matrixU(), dec.singularValues(), dec.matrixV()};
}

std::pair<SubspaceBasis, DenseMatrix> best_rank_k(const DenseMatrix& X, Index k) {
  if (k < 1 || k > std::min(X.rows(), X.cols())) {
    throw std::invalid_argument("best_rank_k: k out of range");
  }
  SvdFactors f = svd(X);
  SubspaceBasis basis{f.U.leftCols(k), f.V.leftCols(k), true};
  DenseMatrix approx =
      f.U.leftCols(k) * f.sigma.head(k).asDiagonal() * f.V.leftCols(k).transpose();
  return {std::move(basis), std::move(approx)};
}

}  // namespace malps
