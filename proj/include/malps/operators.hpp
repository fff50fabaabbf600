#pragma once

#include <cstdint>
#include <string>
#include <utility>
#include <vector>

#include "malps/types.hpp"

#include "json.hpp"

namespace malps {

enum class OperatorKind { mask, structured, identity };

std::string to_string(OperatorKind kind);

// Linear measurement map A: R^{m x n} -> R^p with adjoint A*.
//
//   mask        entries of X at a coordinate set Omega, sorted row-major
//   structured  sign flip, permutation, fast Walsh-Hadamard transform of
//               vec(X), then subsampling; the full transform is orthonormal
//   identity    row-major vectorization, p = m * n
//
// Operators are immutable after construction; apply/adjoint are pure.
class LinearOperator {
 public:
  // p coordinates sampled uniformly without replacement from a seeded RNG
  static LinearOperator mask(Index m, Index n, Index p, std::uint64_t seed);
  // explicit coordinate list (row-major linear indices, duplicates rejected)
  static LinearOperator mask_from_indices(Index m, Index n,
                                          std::vector<std::size_t> indices);
  static LinearOperator structured(Index m, Index n, Index p, std::uint64_t seed);
  static LinearOperator identity(Index m, Index n);

  Vector apply(const DenseMatrix& X) const;
  DenseMatrix adjoint(const Vector& v) const;

  // gradient of f(X) = ||y - A X||_2^2, i.e. -2 A*(y - A X)
  DenseMatrix gradient(const Vector& y, const DenseMatrix& X) const;

  OperatorKind kind() const { return kind_; }
  Index signal_rows() const { return m_; }
  Index signal_cols() const { return n_; }
  Index measurements() const { return p_; }
  const std::vector<std::size_t>& sample_indices() const { return samples_; }

  // structured-kind internals (sign-flip vector, permutation, padded length)
  std::size_t transform_length() const { return transform_length_; }
  const std::vector<double>& signs() const { return signs_; }
  const std::vector<std::size_t>& permutation() const { return permutation_; }

  // Reproducibility descriptor (kind, dims, seed). Seeded operators are
  // regenerated from the seed; explicit masks store their index list.
  nlohmann::json descriptor() const;
  static LinearOperator from_descriptor(const nlohmann::json& doc);

 private:
  LinearOperator(OperatorKind kind, Index m, Index n, Index p)
      : kind_(kind), m_(m), n_(n), p_(p) {}

  OperatorKind kind_;
  Index m_ = 0;
  Index n_ = 0;
  Index p_ = 0;
  std::uint64_t seed_ = 0;
  bool seeded_ = false;

  // mask: Omega as sorted row-major linear indices (size p)
  // structured: transform-domain sample positions (size p)
  std::vector<std::size_t> samples_;

  // structured only; transform length is the next power of two >= m * n
  std::size_t transform_length_ = 0;
  std::vector<double> signs_;
  std::vector<std::size_t> permutation_;
};

// Observations y = A X* + eps together with the noise energy used at
// generation time (0 when noiseless or unknown).
struct Observation {
  Vector y;
  double noise_energy = 0.0;
};

// Monte-Carlo lower bound on the restricted isometry constant delta_k over
// `trials` random rank-k unit-Frobenius matrices L R^T. Returns the one-sided
// deviation estimates (lower, upper) of ||A X||_2^2 from 1.
std::pair<double, double> rip_probe(const LinearOperator& A, int k, int trials,
                                    std::uint64_t seed);

}  // namespace malps
