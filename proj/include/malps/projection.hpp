#pragma once

#include <cstdint>
#include <utility>

#include "malps/subspace.hpp"
#include "malps/svd.hpp"

namespace malps {

enum class ProjectorMode { exact, randomized_power, column_subset };

// Interchangeable rank-k subspace finders. Given the same seed two calls are
// bit-identical, so parallel Monte-Carlo sweeps stay reproducible.
struct ProjectorSpec {
  ProjectorMode mode = ProjectorMode::exact;
  int k = 1;
  int q = 2;           // power iterations (randomized mode)
  int oversample = 5;  // extra sketch columns (randomized mode)
  double epsilon = 0.5;  // target slack (column-subset mode)
  std::uint64_t seed = 0;

  ProjectorSpec with(int rank, std::uint64_t new_seed) const {
    ProjectorSpec s = *this;
    s.k = rank;
    s.seed = new_seed;
    return s;
  }
};

// Rank-k approximation of X under the selected mode. The returned basis is
// strict and the matrix has rank <= k.
//
//   exact            truncated SVD
//   randomized_power Gaussian sketch Y = (X X^T)^q X Omega, re-orthonormalized
//                    after every application, lifted through a small SVD and
//                    truncated to k
//   column_subset    adaptive column sampling proportional to squared residual
//                    column norms, then the rank-k truncation of the projection
//                    onto the sampled dictionary
std::pair<SubspaceBasis, DenseMatrix> project(const ProjectorSpec& spec,
                                              const DenseMatrix& X);

// Achieved slack ||Xhat - X||_F^2 / ||P_k(X) - X||_F^2 - 1. Throws
// std::invalid_argument when X has rank <= k (degenerate denominator).
double measured_epsilon(const ProjectorSpec& spec, const DenseMatrix& X);

}  // namespace malps
