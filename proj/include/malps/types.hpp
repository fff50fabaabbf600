#pragma once

#include <Eigen/Dense>
#include <stdexcept>
#include <string>

namespace malps {

// Signals, estimates and gradients are plain dense matrices. Row-major storage
// so that vec(X) coincides with the raw entry order the measurement operators
// consume.
using DenseMatrix =
    Eigen::Matrix<double, Eigen::Dynamic, Eigen::Dynamic, Eigen::RowMajor>;
using Vector = Eigen::VectorXd;
using Index = Eigen::Index;

// Thin SVD X = U diag(sigma) V^T with sigma nonincreasing.
struct SvdFactors {
  Eigen::MatrixXd U;
  Eigen::VectorXd sigma;
  Eigen::MatrixXd V;
};

// Thrown when an iterate blows up; carries the offending iteration.
class DivergenceError : public std::runtime_error {
 public:
  DivergenceError(const std::string& what, int iteration)
      : std::runtime_error(what), iteration_(iteration) {}
  int iteration() const { return iteration_; }

 private:
  int iteration_;
};

}  // namespace malps
