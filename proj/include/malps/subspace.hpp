#pragma once

#include "malps/types.hpp"

namespace malps {

// A set of orthonormal rank-1 matrices {u_i v_i^T}, stored as the paired
// factors U = [u_1 ... u_r] and V = [v_1 ... v_r]. Bases produced by a single
// SVD (or by ortho_union) are strict: both factors have orthonormal columns
// and the atoms are pairwise orthogonal. raw_union concatenates factors
// without re-orthogonalization, so strict_orthonormal turns false and the
// projection routines orthonormalize a working copy on demand.
struct SubspaceBasis {
  Eigen::MatrixXd left;   // m x r
  Eigen::MatrixXd right;  // n x r
  bool strict_orthonormal = true;

  Index signal_rows() const { return left.rows(); }
  Index signal_cols() const { return right.rows(); }
  Index rank() const { return left.cols(); }
  bool is_empty() const { return left.cols() == 0; }

  // the empty set used to initialize X_0
  static SubspaceBasis empty(Index m, Index n) {
    return SubspaceBasis{Eigen::MatrixXd(m, 0), Eigen::MatrixXd(n, 0), true};
  }

  // Validating constructor: checks per-entry orthonormality of both factors to
  // 1e-10 and repairs violations with one Gram-Schmidt re-pass.
  static SubspaceBasis make(Eigen::MatrixXd U, Eigen::MatrixXd V);
};

// P_S X = P_U X + X P_V - P_U X P_V; the zero matrix for an empty basis.
DenseMatrix project_subspace(const SubspaceBasis& S, const DenseMatrix& X);

// X - P_S X
DenseMatrix project_complement(const SubspaceBasis& S, const DenseMatrix& X);

// Inexact surrogate P_U X (column-space side only).
DenseMatrix project_left_only(const SubspaceBasis& S, const DenseMatrix& X);

// Row-space analogue X P_V, used when m > n.
DenseMatrix project_right_only(const SubspaceBasis& S, const DenseMatrix& X);

// Minimum-cardinality orthonormal basis spanning span(S1 u S2). Left factor
// spans range([U1 U2]), right factor range([V1 V2]); the smaller factor is
// padded with an orthonormal completion so both keep the same column count.
SubspaceBasis ortho_union(const SubspaceBasis& S1, const SubspaceBasis& S2);

// Concatenation without re-orthogonalization; strict_orthonormal = false.
SubspaceBasis raw_union(const SubspaceBasis& S1, const SubspaceBasis& S2);

}  // namespace malps
