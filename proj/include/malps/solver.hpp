#pragma once

#include <optional>
#include <string>
#include <utility>

#include "malps/operators.hpp"
#include "malps/projection.hpp"
#include "malps/report.hpp"

namespace malps {

enum class Algorithm { alps1, alps1_nodebias, admira, alps2, alps2_qr, svp };
enum class UnionMode { ortho, raw };
enum class ProjectionMode { exact_two_sided, left_inexact };

Algorithm algorithm_from_string(const std::string& name);
std::string to_string(Algorithm algo);

// Momentum step size policy for the memory-based solvers.
//   constant    tau fixed in [0, 1)
//   adaptive    tau minimizing ||y - A Q(i+1)||_2^2 from cached applies
//   nesterov_q  alpha-recursion alpha^2 = (1 - alpha) alpha_i^2 + q alpha
struct MomentumPolicy {
  enum class Kind { constant, adaptive, nesterov_q };
  Kind kind = Kind::adaptive;
  double tau = 0.0;
  double q = 1.0;
  double alpha0 = 0.5;
};

struct SolverConfig {
  Algorithm algorithm = Algorithm::alps2;
  int k = 1;
  int max_iters = 500;
  double tol = 5e-5;
  ProjectionMode projection_mode = ProjectionMode::exact_two_sided;
  ProjectorSpec projector;  // rank is overridden by k inside solve()
  MomentumPolicy momentum;
  UnionMode union_mode = UnionMode::raw;  // Q_{i+1} bookkeeping, alps2 family
  int cg_maxiter = 500;
  double cg_tol = 1e-10;
  double svp_mu = 1.0;
  std::uint64_t seed = 0;
};

// Exact line-search step size mu = ||P_S g||_F^2 / ||A P_S g||_2^2.
// Returns nullopt when the projected gradient vanishes (caller stops) or when
// A annihilates it (no descent possible along this direction).
std::optional<double> step_size_mu(const LinearOperator& A,
                                   const SubspaceBasis& S,
                                   const DenseMatrix& grad);

// Momentum weight tau_i. The adaptive kind consumes the cached measurement
// vectors of the current and previous estimates and returns 0 when they
// coincide; the nesterov kind advances alpha_state.
double momentum_tau(const MomentumPolicy& policy, const Vector& y,
                    const Vector& ax_cur, const Vector& ax_prev,
                    double& alpha_state);

struct RestrictedLsResult {
  DenseMatrix solution;
  bool converged = false;
  bool rank_deficient = false;
  int iterations = 0;
};

// argmin_{V in span(S)} ||y - A V||_2^2 over the span of the rank-1 atoms
// u_i v_i^T of S, by conjugate gradients on the normal equations in atom
// coordinates; rank(V) <= |S|. Stops when the projected gradient residual
// drops below cg_tol * max(1, ||y||_2). A rank-deficient operator on span(S)
// yields the current (least-norm) CG iterate with a warning flag.
RestrictedLsResult restricted_least_squares(const LinearOperator& A,
                                            const Vector& y,
                                            const SubspaceBasis& S,
                                            int cg_maxiter, double cg_tol);

// ||X_cur - X_prev||_F <= tol * ||X_cur||_F, with an absolute comparison when
// X_cur vanishes; boundary counts as converged.
bool stopping_check(const DenseMatrix& X_cur, const DenseMatrix& X_prev,
                    double tol);

// Runs the selected algorithm to completion. Throws DivergenceError when an
// iterate turns non-finite or the data error exceeds 1e6 * f(0).
std::pair<DenseMatrix, RunReport> solve(const LinearOperator& A, const Vector& y,
                                        const SolverConfig& config,
                                        const DenseMatrix* X_true = nullptr);

}  // namespace malps
