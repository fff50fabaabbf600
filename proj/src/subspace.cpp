#include "malps/subspace.hpp"

#include <Eigen/QR>
#include <stdexcept>

namespace malps {

namespace {

constexpr double kOrthoTol = 1e-10;

bool columns_orthonormal(const Eigen::MatrixXd& M) {
  if (M.cols() == 0) return true;
  Eigen::MatrixXd gram = M.transpose() * M;
  gram.diagonal().array() -= 1.0;
  return gram.cwiseAbs().maxCoeff() <= kOrthoTol;
}

// Modified Gram-Schmidt with one re-orthogonalization pass. Columns that
// collapse below tolerance are dropped.
Eigen::MatrixXd gram_schmidt(const Eigen::MatrixXd& M) {
  Eigen::MatrixXd Q(M.rows(), M.cols());
  Index r = 0;
  for (Index j = 0; j < M.cols(); ++j) {
    Eigen::VectorXd v = M.col(j);
    for (int pass = 0; pass < 2; ++pass) {
      for (Index i = 0; i < r; ++i) {
        v -= Q.col(i).dot(v) * Q.col(i);
      }
    }
    const double norm = v.norm();
    if (norm > kOrthoTol) {
      Q.col(r++) = v / norm;
    }
  }
  return Q.leftCols(r);
}

// Orthonormal basis of range(M), plus the full Q so callers can pull an
// orthonormal completion from the trailing columns.
struct RangeBasis {
  Eigen::MatrixXd basis;
  Eigen::MatrixXd full_q;
};

RangeBasis range_basis(const Eigen::MatrixXd& M) {
  if (M.cols() == 0) {
    return {Eigen::MatrixXd(M.rows(), 0),
            Eigen::MatrixXd::Identity(M.rows(), M.rows())};
  }
  Eigen::ColPivHouseholderQR<Eigen::MatrixXd> qr(M);
  qr.setThreshold(kOrthoTol);
  const Index r = qr.rank();
  Eigen::MatrixXd full = qr.householderQ() * Eigen::MatrixXd::Identity(M.rows(), M.rows());
  return {full.leftCols(r), std::move(full)};
}

void check_signal_dims(const SubspaceBasis& S, const DenseMatrix& X) {
  if (S.signal_rows() != X.rows() || S.signal_cols() != X.cols()) {
    throw std::invalid_argument("subspace projection: dimension mismatch");
  }
}

}  // namespace

SubspaceBasis SubspaceBasis::make(Eigen::MatrixXd U, Eigen::MatrixXd V) {
  if (U.cols() != V.cols()) {
    throw std::invalid_argument("SubspaceBasis: factor rank mismatch");
  }
  if (!columns_orthonormal(U)) U = gram_schmidt(U);
  if (!columns_orthonormal(V)) V = gram_schmidt(V);
  if (U.cols() != V.cols()) {
    throw std::invalid_argument("SubspaceBasis: factors collapse to different ranks");
  }
  return SubspaceBasis{std::move(U), std::move(V), true};
}

namespace detail {

// Working factors with orthonormal columns; raw unions are re-orthonormalized
// here, lazily, so the projection formulas stay exact.
std::pair<Eigen::MatrixXd, Eigen::MatrixXd> orthonormal_factors(const SubspaceBasis& S) {
  if (S.strict_orthonormal) return {S.left, S.right};
  return {gram_schmidt(S.left), gram_schmidt(S.right)};
}

}  // namespace detail

DenseMatrix project_subspace(const SubspaceBasis& S, const DenseMatrix& X) {
  check_signal_dims(S, X);
  if (S.is_empty()) return DenseMatrix::Zero(X.rows(), X.cols());
  auto [U, V] = detail::orthonormal_factors(S);
  DenseMatrix pu_x = U * (U.transpose() * X);
  DenseMatrix x_pv = (X * V) * V.transpose();
  DenseMatrix pu_x_pv = (U * (U.transpose() * X * V)) * V.transpose();
  return pu_x + x_pv - pu_x_pv;
}

DenseMatrix project_complement(const SubspaceBasis& S, const DenseMatrix& X) {
  return X - project_subspace(S, X);
}

DenseMatrix project_left_only(const SubspaceBasis& S, const DenseMatrix& X) {
  if (S.signal_rows() != X.rows()) {
    throw std::invalid_argument("project_left_only: dimension mismatch");
  }
  if (S.is_empty()) return DenseMatrix::Zero(X.rows(), X.cols());
  auto [U, V] = detail::orthonormal_factors(S);
  (void)V;
  return U * (U.transpose() * X);
}

DenseMatrix project_right_only(const SubspaceBasis& S, const DenseMatrix& X) {
  if (S.signal_cols() != X.cols()) {
    throw std::invalid_argument("project_right_only: dimension mismatch");
  }
  if (S.is_empty()) return DenseMatrix::Zero(X.rows(), X.cols());
  auto [U, V] = detail::orthonormal_factors(S);
  (void)U;
  return (X * V) * V.transpose();
}

SubspaceBasis ortho_union(const SubspaceBasis& S1, const SubspaceBasis& S2) {
  if (S1.signal_rows() != S2.signal_rows() || S1.signal_cols() != S2.signal_cols()) {
    throw std::invalid_argument("ortho_union: dimension mismatch");
  }
  Eigen::MatrixXd stacked_left(S1.left.rows(), S1.rank() + S2.rank());
  stacked_left << S1.left, S2.left;
  Eigen::MatrixXd stacked_right(S1.right.rows(), S1.rank() + S2.rank());
  stacked_right << S1.right, S2.right;

  RangeBasis lb = range_basis(stacked_left);
  RangeBasis rb = range_basis(stacked_right);
  Index r_left = lb.basis.cols();
  Index r_right = rb.basis.cols();

  // The stored rank is capped at min(m, n): one side may span more directions
  // than the other side's whole space, and once a factor saturates its space
  // the projection is the identity no matter what the other factor holds.
  const Index r = std::min(std::max(r_left, r_right),
                           std::min(S1.left.rows(), S1.right.rows()));
  r_left = std::min(r_left, r);
  r_right = std::min(r_right, r);

  // Pad the thinner factor with orthonormal completion columns; only P_U and
  // P_V enter the projections.
  Eigen::MatrixXd left(S1.left.rows(), r);
  left.leftCols(r_left) = lb.basis.leftCols(r_left);
  if (r_left < r) left.rightCols(r - r_left) = lb.full_q.middleCols(r_left, r - r_left);
  Eigen::MatrixXd right(S1.right.rows(), r);
  right.leftCols(r_right) = rb.basis.leftCols(r_right);
  if (r_right < r) right.rightCols(r - r_right) = rb.full_q.middleCols(r_right, r - r_right);

  return SubspaceBasis{std::move(left), std::move(right), true};
}

SubspaceBasis raw_union(const SubspaceBasis& S1, const SubspaceBasis& S2) {
  if (S1.signal_rows() != S2.signal_rows() || S1.signal_cols() != S2.signal_cols()) {
    throw std::invalid_argument("raw_union: dimension mismatch");
  }
  if (S1.is_empty()) return S2;
  if (S2.is_empty()) return S1;
  Eigen::MatrixXd left(S1.left.rows(), S1.rank() + S2.rank());
  left << S1.left, S2.left;
  Eigen::MatrixXd right(S1.right.rows(), S1.rank() + S2.rank());
  right << S1.right, S2.right;
  return SubspaceBasis{std::move(left), std::move(right), false};
}

}  // namespace malps
