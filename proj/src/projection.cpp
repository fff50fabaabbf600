#include "malps/projection.hpp"

#include <Eigen/QR>
#include <cmath>
#include <stdexcept>

#include "malps/rng.hpp"

namespace malps {

namespace {

void validate(const ProjectorSpec& spec, const DenseMatrix& X) {
  if (spec.k < 1 || spec.k > std::min(X.rows(), X.cols())) {
    throw std::invalid_argument("projector: k out of range");
  }
  if (spec.q < 0) {
    throw std::invalid_argument("projector: q must be nonnegative");
  }
  if (spec.oversample < 0) {
    throw std::invalid_argument("projector: oversample must be nonnegative");
  }
  if (spec.mode == ProjectorMode::column_subset && spec.epsilon <= 0.0) {
    throw std::invalid_argument("projector: epsilon must be positive");
  }
}

Eigen::MatrixXd orthonormalize(const Eigen::MatrixXd& M) {
  Eigen::HouseholderQR<Eigen::MatrixXd> qr(M);
  return qr.householderQ() * Eigen::MatrixXd::Identity(M.rows(), M.cols());
}

// Rank-k truncation of W W^T X for a column-orthonormal dictionary W, lifted
// through the SVD of the small matrix W^T X.
std::pair<SubspaceBasis, DenseMatrix> truncate_through(const Eigen::MatrixXd& W,
                                                       const DenseMatrix& X,
                                                       Index k) {
  Eigen::MatrixXd B = W.transpose() * X;  // (k+s) x n
  Eigen::BDCSVD<Eigen::MatrixXd> dec(B, Eigen::ComputeThinU | Eigen::ComputeThinV);
  const Index kk = std::min<Index>(k, dec.singularValues().size());
  Eigen::MatrixXd U = W * dec.matrixU().leftCols(kk);
  Eigen::MatrixXd V = dec.matrixV().leftCols(kk);
  DenseMatrix approx = U * dec.singularValues().head(kk).asDiagonal() * V.transpose();
  return {SubspaceBasis{std::move(U), std::move(V), true}, std::move(approx)};
}

std::pair<SubspaceBasis, DenseMatrix> randomized_project(const ProjectorSpec& spec,
                                                         const DenseMatrix& X) {
  const Index sketch = std::min<Index>(spec.k + spec.oversample, std::min(X.rows(), X.cols()));
  Rng rng(spec.seed);
  Eigen::MatrixXd test(X.cols(), sketch);
  for (Index r = 0; r < test.rows(); ++r)
    for (Index c = 0; c < test.cols(); ++c) test(r, c) = rng.gaussian();

  // Y = (X X^T)^q X Omega, re-orthonormalized after every application to keep
  // the sketch from losing digits to the dominant directions.
  Eigen::MatrixXd W = orthonormalize(X * test);
  for (int j = 0; j < spec.q; ++j) {
    Eigen::MatrixXd Z = orthonormalize(X.transpose() * W);
    W = orthonormalize(X * Z);
  }
  return truncate_through(W, X, spec.k);
}

std::pair<SubspaceBasis, DenseMatrix> column_subset_project(const ProjectorSpec& spec,
                                                            const DenseMatrix& X) {
  const Index n = X.cols();
  const Index k = spec.k;
  const int rounds = static_cast<int>(
      std::ceil(2.0 * (k + 1) * (std::log(static_cast<double>(k + 1)) + 1.0)));
  const double k_d = static_cast<double>(k);
  const Index per_round = std::min<Index>(
      n, static_cast<Index>(std::ceil(
             k_d / spec.epsilon + k_d * k_d * std::max(0.0, std::log(k_d)))));

  Rng rng(spec.seed);
  Eigen::MatrixXd W(X.rows(), 0);  // orthonormal column dictionary
  DenseMatrix residual = X;
  for (int round = 0; round < rounds && W.cols() < std::min(X.rows(), n); ++round) {
    Eigen::VectorXd weights = residual.colwise().squaredNorm().transpose();
    const double total = weights.sum();
    if (total <= 1e-28) break;

    // c draws proportional to squared residual column norms, by inverse CDF
    Eigen::VectorXd cdf(n);
    double acc = 0.0;
    for (Index j = 0; j < n; ++j) {
      acc += weights[j];
      cdf[j] = acc;
    }
    for (Index draw = 0; draw < per_round; ++draw) {
      const double u = rng.uniform() * total;
      Index lo = 0, hi = n - 1;
      while (lo < hi) {
        const Index mid = (lo + hi) / 2;
        if (cdf[mid] < u) lo = mid + 1;
        else hi = mid;
      }
      // Gram-Schmidt the picked column into the dictionary
      Eigen::VectorXd v = X.col(lo);
      for (int pass = 0; pass < 2; ++pass) {
        for (Index i = 0; i < W.cols(); ++i) v -= W.col(i).dot(v) * W.col(i);
      }
      const double norm = v.norm();
      if (norm > 1e-10 * std::max(1.0, X.col(lo).norm())) {
        W.conservativeResize(Eigen::NoChange, W.cols() + 1);
        W.col(W.cols() - 1) = v / norm;
      }
    }
    residual = X - DenseMatrix(W * (W.transpose() * X));
  }
  if (W.cols() == 0) {
    // X was (numerically) zero; fall back to the exact projector
    return best_rank_k(X, k);
  }
  return truncate_through(W, X, k);
}

}  // namespace

std::pair<SubspaceBasis, DenseMatrix> project(const ProjectorSpec& spec,
                                              const DenseMatrix& X) {
  validate(spec, X);
  switch (spec.mode) {
    case ProjectorMode::exact: return best_rank_k(X, spec.k);
    case ProjectorMode::randomized_power: return randomized_project(spec, X);
    case ProjectorMode::column_subset: return column_subset_project(spec, X);
  }
  throw std::logic_error("project: unreachable");
}

double measured_epsilon(const ProjectorSpec& spec, const DenseMatrix& X) {
  validate(spec, X);
  const auto [basis_opt, optimal] = best_rank_k(X, spec.k);
  const double denom = (optimal - X).squaredNorm();
  if (denom <= 1e-24 * std::max(1.0, X.squaredNorm())) {
    throw std::invalid_argument("measured_epsilon: X has rank <= k");
  }
  const auto [basis, approx] = project(spec, X);
  return (approx - X).squaredNorm() / denom - 1.0;
}

}  // namespace malps
