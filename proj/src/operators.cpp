#include "malps/operators.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>
#include <unordered_set>

#include "malps/rng.hpp"

namespace malps {

namespace {

std::size_t next_pow2(std::size_t n) {
  std::size_t p = 1;
  while (p < n) p <<= 1;
  return p;
}

// In-place normalized Walsh-Hadamard transform; length must be a power of two.
// The normalized transform is symmetric and orthogonal, so it is its own
// adjoint.
void fwht(std::vector<double>& x) {
  const std::size_t n = x.size();
  for (std::size_t h = 1; h < n; h <<= 1) {
    for (std::size_t i = 0; i < n; i += (h << 1)) {
      for (std::size_t j = i; j < i + h; ++j) {
        const double a = x[j];
        const double b = x[j + h];
        x[j] = a + b;
        x[j + h] = a - b;
      }
    }
  }
  const double scale = 1.0 / std::sqrt(static_cast<double>(n));
  for (double& v : x) v *= scale;
}

}  // namespace

std::string to_string(OperatorKind kind) {
  switch (kind) {
    case OperatorKind::mask: return "mask";
    case OperatorKind::structured: return "structured";
    case OperatorKind::identity: return "identity";
  }
  return "unknown";
}

LinearOperator LinearOperator::mask(Index m, Index n, Index p, std::uint64_t seed) {
  if (m < 1 || n < 1 || p < 1 || p > m * n) {
    throw std::invalid_argument("mask operator: invalid dimensions");
  }
  LinearOperator op(OperatorKind::mask, m, n, p);
  op.seed_ = seed;
  op.seeded_ = true;
  Rng rng(seed);
  op.samples_ = rng.sample_without_replacement(static_cast<std::size_t>(m * n),
                                               static_cast<std::size_t>(p));
  std::sort(op.samples_.begin(), op.samples_.end());
  return op;
}

LinearOperator LinearOperator::mask_from_indices(Index m, Index n,
                                                 std::vector<std::size_t> indices) {
  if (m < 1 || n < 1 || indices.empty()) {
    throw std::invalid_argument("mask operator: invalid dimensions");
  }
  std::sort(indices.begin(), indices.end());
  if (indices.back() >= static_cast<std::size_t>(m * n)) {
    throw std::invalid_argument("mask operator: index out of range");
  }
  if (std::adjacent_find(indices.begin(), indices.end()) != indices.end()) {
    throw std::invalid_argument("mask operator: duplicate coordinates");
  }
  LinearOperator op(OperatorKind::mask, m, n, static_cast<Index>(indices.size()));
  op.samples_ = std::move(indices);
  return op;
}

LinearOperator LinearOperator::structured(Index m, Index n, Index p, std::uint64_t seed) {
  if (m < 1 || n < 1 || p < 1) {
    throw std::invalid_argument("structured operator: invalid dimensions");
  }
  const std::size_t len = next_pow2(static_cast<std::size_t>(m * n));
  if (p > static_cast<Index>(len)) {
    throw std::invalid_argument("structured operator: too many measurements");
  }
  LinearOperator op(OperatorKind::structured, m, n, p);
  op.seed_ = seed;
  op.seeded_ = true;
  op.transform_length_ = len;
  Rng rng(seed);
  op.signs_.resize(len);
  for (double& s : op.signs_) s = static_cast<double>(rng.sign());
  op.permutation_ = rng.permutation(len);
  op.samples_ = rng.sample_without_replacement(len, static_cast<std::size_t>(p));
  std::sort(op.samples_.begin(), op.samples_.end());
  return op;
}

LinearOperator LinearOperator::identity(Index m, Index n) {
  if (m < 1 || n < 1) {
    throw std::invalid_argument("identity operator: invalid dimensions");
  }
  return LinearOperator(OperatorKind::identity, m, n, m * n);
}

Vector LinearOperator::apply(const DenseMatrix& X) const {
  if (X.rows() != m_ || X.cols() != n_) {
    throw std::invalid_argument("apply: dimension mismatch");
  }
  switch (kind_) {
    case OperatorKind::identity: {
      return Eigen::Map<const Vector>(X.data(), m_ * n_);
    }
    case OperatorKind::mask: {
      Vector y(p_);
      const double* data = X.data();
      for (Index i = 0; i < p_; ++i) y[i] = data[samples_[i]];
      return y;
    }
    case OperatorKind::structured: {
      std::vector<double> buf(transform_length_, 0.0);
      const double* data = X.data();
      const std::size_t mn = static_cast<std::size_t>(m_ * n_);
      for (std::size_t i = 0; i < mn; ++i) buf[i] = signs_[i] * data[i];
      std::vector<double> permuted(transform_length_);
      for (std::size_t i = 0; i < transform_length_; ++i) {
        permuted[i] = buf[permutation_[i]];
      }
      fwht(permuted);
      Vector y(p_);
      for (Index i = 0; i < p_; ++i) y[i] = permuted[samples_[i]];
      return y;
    }
  }
  throw std::logic_error("apply: unreachable");
}

DenseMatrix LinearOperator::adjoint(const Vector& v) const {
  if (v.size() != p_) {
    throw std::invalid_argument("adjoint: length mismatch");
  }
  switch (kind_) {
    case OperatorKind::identity: {
      return Eigen::Map<const DenseMatrix>(v.data(), m_, n_);
    }
    case OperatorKind::mask: {
      DenseMatrix X = DenseMatrix::Zero(m_, n_);
      double* data = X.data();
      for (Index i = 0; i < p_; ++i) data[samples_[i]] = v[i];
      return X;
    }
    case OperatorKind::structured: {
      std::vector<double> buf(transform_length_, 0.0);
      for (Index i = 0; i < p_; ++i) buf[samples_[i]] = v[i];
      fwht(buf);
      std::vector<double> unpermuted(transform_length_);
      for (std::size_t i = 0; i < transform_length_; ++i) {
        unpermuted[permutation_[i]] = buf[i];
      }
      DenseMatrix X(m_, n_);
      double* data = X.data();
      const std::size_t mn = static_cast<std::size_t>(m_ * n_);
      for (std::size_t i = 0; i < mn; ++i) data[i] = signs_[i] * unpermuted[i];
      return X;
    }
  }
  throw std::logic_error("adjoint: unreachable");
}

DenseMatrix LinearOperator::gradient(const Vector& y, const DenseMatrix& X) const {
  if (y.size() != p_) {
    throw std::invalid_argument("gradient: measurement length mismatch");
  }
  return -2.0 * adjoint(y - apply(X));
}

nlohmann::json LinearOperator::descriptor() const {
  nlohmann::json doc{{"kind", to_string(kind_)}, {"m", m_}, {"n", n_}, {"p", p_}};
  if (seeded_) {
    doc["seed"] = seed_;
  } else if (kind_ == OperatorKind::mask) {
    doc["indices"] = samples_;
  }
  return doc;
}

LinearOperator LinearOperator::from_descriptor(const nlohmann::json& doc) {
  const std::string kind = doc.at("kind").get<std::string>();
  const Index m = doc.at("m").get<Index>();
  const Index n = doc.at("n").get<Index>();
  if (kind == "identity") return identity(m, n);
  const Index p = doc.at("p").get<Index>();
  if (kind == "mask") {
    if (doc.contains("seed")) {
      return mask(m, n, p, doc.at("seed").get<std::uint64_t>());
    }
    return mask_from_indices(m, n, doc.at("indices").get<std::vector<std::size_t>>());
  }
  if (kind == "structured") {
    return structured(m, n, p, doc.at("seed").get<std::uint64_t>());
  }
  throw std::invalid_argument("operator descriptor: unknown kind '" + kind + "'");
}

std::pair<double, double> rip_probe(const LinearOperator& A, int k, int trials,
                                    std::uint64_t seed) {
  if (k < 1 || k > std::min(A.signal_rows(), A.signal_cols())) {
    throw std::invalid_argument("rip_probe: k out of range");
  }
  if (trials < 1) {
    throw std::invalid_argument("rip_probe: trials must be positive");
  }
  double lower = 0.0;
  double upper = 0.0;
  for (int t = 0; t < trials; ++t) {
    Rng rng(mix_seed(seed, static_cast<std::uint64_t>(t)));
    Eigen::MatrixXd L(A.signal_rows(), k);
    Eigen::MatrixXd R(A.signal_cols(), k);
    for (Index r = 0; r < L.rows(); ++r)
      for (Index c = 0; c < L.cols(); ++c) L(r, c) = rng.gaussian();
    for (Index r = 0; r < R.rows(); ++r)
      for (Index c = 0; c < R.cols(); ++c) R(r, c) = rng.gaussian();
    DenseMatrix X = L * R.transpose();
    const double norm = X.norm();
    if (norm == 0.0) continue;
    X /= norm;
    const double energy = A.apply(X).squaredNorm();
    lower = std::max(lower, 1.0 - energy);
    upper = std::max(upper, energy - 1.0);
  }
  return {lower, upper};
}

}  // namespace malps
