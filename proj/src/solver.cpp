#include "malps/solver.hpp"

#include <chrono>
#include <cmath>
#include <limits>
#include <stdexcept>

#include "malps/rng.hpp"
#include "malps/svd.hpp"

namespace malps {

Algorithm algorithm_from_string(const std::string& name) {
  if (name == "alps1") return Algorithm::alps1;
  if (name == "alps1_nodebias") return Algorithm::alps1_nodebias;
  if (name == "admira") return Algorithm::admira;
  if (name == "alps2") return Algorithm::alps2;
  if (name == "alps2_qr") return Algorithm::alps2_qr;
  if (name == "svp") return Algorithm::svp;
  throw std::invalid_argument("unknown algorithm '" + name + "'");
}

std::string to_string(Algorithm algo) {
  switch (algo) {
    case Algorithm::alps1: return "alps1";
    case Algorithm::alps1_nodebias: return "alps1_nodebias";
    case Algorithm::admira: return "admira";
    case Algorithm::alps2: return "alps2";
    case Algorithm::alps2_qr: return "alps2_qr";
    case Algorithm::svp: return "svp";
  }
  return "unknown";
}

namespace {

// Active-subspace projection honoring the configured mode: the cheap one-sided
// surrogate replaces the two-sided formula, taking the side matching the
// thinner signal dimension.
DenseMatrix project_active(const SubspaceBasis& S, const DenseMatrix& X,
                           ProjectionMode mode) {
  if (mode == ProjectionMode::left_inexact) {
    if (X.rows() <= X.cols()) return project_left_only(S, X);
    return project_right_only(S, X);
  }
  return project_subspace(S, X);
}

std::optional<double> step_from_projected(const LinearOperator& A,
                                          const DenseMatrix& projected_grad) {
  const double num = projected_grad.squaredNorm();
  if (!(num > 0.0)) return std::nullopt;
  const double den = A.apply(projected_grad).squaredNorm();
  if (!(den > 0.0)) return std::nullopt;
  return num / den;
}

void validate_momentum(const MomentumPolicy& policy) {
  switch (policy.kind) {
    case MomentumPolicy::Kind::constant:
      if (policy.tau < 0.0 || policy.tau >= 1.0) {
        throw std::invalid_argument("momentum: constant tau must lie in [0, 1)");
      }
      break;
    case MomentumPolicy::Kind::nesterov_q:
      if (policy.q <= 0.0 || policy.q > 1.0) {
        throw std::invalid_argument("momentum: nesterov q must lie in (0, 1]");
      }
      if (policy.alpha0 <= 0.0 || policy.alpha0 >= 1.0) {
        throw std::invalid_argument("momentum: alpha0 must lie in (0, 1)");
      }
      break;
    case MomentumPolicy::Kind::adaptive:
      break;
  }
}

class SolverRun {
 public:
  SolverRun(const LinearOperator& A, const Vector& y, const SolverConfig& cfg,
            const DenseMatrix* truth)
      : A_(A), y_(y), cfg_(cfg), truth_(truth) {
    if (y.size() != A.measurements()) {
      throw std::invalid_argument("solve: measurement length mismatch");
    }
    if (cfg.k < 1 || cfg.k > std::min(A.signal_rows(), A.signal_cols())) {
      throw std::invalid_argument("solve: rank target out of range");
    }
    if (cfg.max_iters < 1) {
      throw std::invalid_argument("solve: max_iters must be positive");
    }
    if (cfg.tol <= 0.0 || cfg.cg_tol <= 0.0) {
      throw std::invalid_argument("solve: tolerances must be positive");
    }
    validate_momentum(cfg.momentum);
    proj_ = cfg.projector;
    proj_.k = cfg.k;
    if (cfg.algorithm == Algorithm::alps2_qr) {
      proj_.mode = ProjectorMode::randomized_power;
    }
  }

  std::pair<DenseMatrix, RunReport> run() {
    const Index m = A_.signal_rows();
    const Index n = A_.signal_cols();
    const auto t0 = std::chrono::steady_clock::now();

    DenseMatrix X_cur = DenseMatrix::Zero(m, n);
    SubspaceBasis basis_cur = SubspaceBasis::empty(m, n);
    DenseMatrix Q_cur = X_cur;
    SubspaceBasis Q_basis = basis_cur;
    Vector ax_cur = Vector::Zero(A_.measurements());
    double alpha_state = cfg_.momentum.alpha0;
    const double f0 = y_.squaredNorm();
    const bool memory = cfg_.algorithm == Algorithm::alps2 ||
                        cfg_.algorithm == Algorithm::alps2_qr;

    RunReport report;
    report.algorithm = to_string(cfg_.algorithm);
    report.m = m;
    report.n = n;
    report.k = cfg_.k;
    report.sampling_ratio =
        static_cast<double>(A_.measurements()) / static_cast<double>(m * n);
    report.freedom_ratio = static_cast<double>(cfg_.k) * (m + n - cfg_.k) /
                           static_cast<double>(A_.measurements());
    report.seed = cfg_.seed;
    TrialRecord trial;

    auto elapsed_ms = [&t0]() {
      return std::chrono::duration<double, std::milli>(
                 std::chrono::steady_clock::now() - t0)
          .count();
    };
    auto record = [&](int iter, const DenseMatrix& X_next, double f_next) {
      IterationRecord rec;
      rec.iter = iter;
      const double xn = X_next.norm();
      const double diff = (X_next - X_cur).norm();
      rec.rel_change = xn > 0.0 ? diff / xn : diff;
      rec.f_value = f_next;
      rec.err_vs_truth = truth_ ? (X_next - *truth_).norm()
                                : std::numeric_limits<double>::quiet_NaN();
      rec.elapsed_ms = elapsed_ms();
      trial.trace.push_back(rec);
    };

    bool done = false;
    for (int iter = 0; iter < cfg_.max_iters && !done; ++iter) {
      const DenseMatrix& anchor = memory ? Q_cur : X_cur;
      DenseMatrix grad = A_.gradient(y_, anchor);
      if (!(grad.squaredNorm() > 0.0)) {
        // measurements already explained; nothing to move
        record(iter + 1, X_cur, (y_ - A_.apply(X_cur)).squaredNorm());
        trial.iterations = iter + 1;
        done = true;
        break;
      }

      DenseMatrix X_next;
      SubspaceBasis basis_next = basis_cur;
      bool stalled = false;

      switch (cfg_.algorithm) {
        case Algorithm::svp: {
          auto [b, Xn] = project(next_projector(),
                                 DenseMatrix(X_cur - 0.5 * cfg_.svp_mu * grad));
          basis_next = std::move(b);
          X_next = std::move(Xn);
          break;
        }
        case Algorithm::alps1:
        case Algorithm::alps1_nodebias: {
          stalled = !greedy_step(grad, X_cur, basis_cur, X_next, basis_next);
          break;
        }
        case Algorithm::admira: {
          admira_step(grad, basis_cur, X_next, basis_next);
          break;
        }
        case Algorithm::alps2:
        case Algorithm::alps2_qr: {
          stalled = !greedy_step(grad, Q_cur, Q_basis, X_next, basis_next);
          break;
        }
      }
      if (stalled) {
        record(iter + 1, X_cur, (y_ - A_.apply(X_cur)).squaredNorm());
        trial.iterations = iter + 1;
        done = true;
        break;
      }

      if (!X_next.allFinite()) {
        throw DivergenceError("solve: non-finite iterate at iteration " +
                                  std::to_string(iter + 1),
                              iter + 1);
      }
      Vector ax_next = A_.apply(X_next);
      const double f_next = (y_ - ax_next).squaredNorm();
      if (f0 > 0.0 && f_next > 1e6 * f0) {
        throw DivergenceError("solve: data error exploded at iteration " +
                                  std::to_string(iter + 1),
                              iter + 1);
      }

      record(iter + 1, X_next, f_next);
      trial.iterations = iter + 1;
      done = stopping_check(X_next, X_cur, cfg_.tol);

      if (memory) {
        const double tau =
            momentum_tau(cfg_.momentum, y_, ax_next, ax_cur, alpha_state);
        Q_cur = X_next + tau * (X_next - X_cur);
        Q_basis = cfg_.union_mode == UnionMode::raw
                      ? raw_union(basis_cur, basis_next)
                      : ortho_union(basis_cur, basis_next);
      }
      ax_cur = std::move(ax_next);
      X_cur = std::move(X_next);
      basis_cur = std::move(basis_next);
    }

    trial.final_error = std::numeric_limits<double>::quiet_NaN();
    if (truth_) {
      const double ref = truth_->norm();
      trial.final_error =
          ref > 0.0 ? (X_cur - *truth_).norm() / ref : (X_cur - *truth_).norm();
    }
    trial.wall_seconds = elapsed_ms() / 1e3;
    report.trials.push_back(std::move(trial));
    return {std::move(X_cur), std::move(report)};
  }

 private:
  // Shared body of the subspace-pursuit algorithms: expand the active
  // subspace, descend on it, reselect a rank-k estimate. Returns false when
  // the projected gradient vanished (clean convergence).
  bool greedy_step(const DenseMatrix& grad, const DenseMatrix& anchor,
                   const SubspaceBasis& anchor_basis, DenseMatrix& X_next,
                   SubspaceBasis& basis_next) {
    DenseMatrix grad_ortho =
        grad - project_active(anchor_basis, grad, cfg_.projection_mode);
    auto [D_basis, D_mat] = project(next_projector(), grad_ortho);
    SubspaceBasis S = ortho_union(D_basis, anchor_basis);

    DenseMatrix pg = project_active(S, grad, cfg_.projection_mode);
    const auto mu = step_from_projected(A_, pg);
    if (!mu) return false;
    DenseMatrix V = anchor - 0.5 * (*mu) * pg;

    auto [W_basis, W] = project(next_projector(), V);
    if (cfg_.algorithm == Algorithm::alps1) {
      // extra exact line-search descent restricted to the fresh subspace
      DenseMatrix grad_w = A_.gradient(y_, W);
      DenseMatrix pgw = project_active(W_basis, grad_w, cfg_.projection_mode);
      const auto xi = step_from_projected(A_, pgw);
      if (xi) {
        DenseMatrix debiased = W - 0.5 * (*xi) * pgw;
        auto [b, Xn] = best_rank_k(debiased, cfg_.k);
        basis_next = std::move(b);
        X_next = std::move(Xn);
        return true;
      }
    }
    basis_next = std::move(W_basis);
    X_next = std::move(W);
    return true;
  }

  // Subspace-pursuit step: merge the best 2k atoms of the gradient proxy into
  // the active set, fit by least squares over the merged atoms, reselect.
  void admira_step(const DenseMatrix& grad, const SubspaceBasis& anchor_basis,
                   DenseMatrix& X_next, SubspaceBasis& basis_next) {
    const Index expand =
        std::min<Index>(2 * cfg_.k, std::min(A_.signal_rows(), A_.signal_cols()));
    ProjectorSpec proxy_spec = next_projector();
    proxy_spec.k = static_cast<int>(expand);
    auto [D_basis, D_mat] = project(proxy_spec, grad);
    SubspaceBasis S = raw_union(D_basis, anchor_basis);

    auto rls = restricted_least_squares(A_, y_, S, cfg_.cg_maxiter, cfg_.cg_tol);
    auto [W_basis, W] = project(next_projector(), rls.solution);
    basis_next = std::move(W_basis);
    X_next = std::move(W);
  }

  ProjectorSpec next_projector() {
    return proj_.with(cfg_.k, mix_seed(cfg_.seed, projector_calls_++));
  }

  const LinearOperator& A_;
  const Vector& y_;
  SolverConfig cfg_;
  const DenseMatrix* truth_;
  ProjectorSpec proj_;
  std::uint64_t projector_calls_ = 0;
};

}  // namespace

std::optional<double> step_size_mu(const LinearOperator& A,
                                   const SubspaceBasis& S,
                                   const DenseMatrix& grad) {
  return step_from_projected(A, project_subspace(S, grad));
}

double momentum_tau(const MomentumPolicy& policy, const Vector& y,
                    const Vector& ax_cur, const Vector& ax_prev,
                    double& alpha_state) {
  validate_momentum(policy);
  switch (policy.kind) {
    case MomentumPolicy::Kind::constant:
      return policy.tau;
    case MomentumPolicy::Kind::adaptive: {
      const Vector d = ax_cur - ax_prev;
      const double den = d.squaredNorm();
      // a stalled iterate carries no momentum; near machine precision the
      // quotient is pure noise and would catapult the extrapolation
      const double floor =
          1e-24 * std::max(y.squaredNorm(), ax_cur.squaredNorm());
      if (!(den > floor)) return 0.0;
      return (y - ax_cur).dot(d) / den;
    }
    case MomentumPolicy::Kind::nesterov_q: {
      // alpha_{i+1} is the positive root of a^2 + (alpha_i^2 - q) a - alpha_i^2
      const double a2 = alpha_state * alpha_state;
      const double b = a2 - policy.q;
      const double alpha_next = 0.5 * (-b + std::sqrt(b * b + 4.0 * a2));
      const double tau =
          alpha_state * (1.0 - alpha_state) / (a2 + alpha_next);
      alpha_state = alpha_next;
      return tau;
    }
  }
  throw std::logic_error("momentum_tau: unreachable");
}

RestrictedLsResult restricted_least_squares(const LinearOperator& A,
                                            const Vector& y,
                                            const SubspaceBasis& S,
                                            int cg_maxiter, double cg_tol) {
  if (S.is_empty()) {
    throw std::invalid_argument("restricted_least_squares: empty subspace");
  }
  if (cg_maxiter < 1 || cg_tol <= 0.0) {
    throw std::invalid_argument("restricted_least_squares: bad CG parameters");
  }

  // min_c ||y - G c||_2 where G maps atom coefficients through A; any matrix
  // in span(S) is V = sum_i c_i u_i v_i^T, so rank(V) <= |S|
  const Index r = S.rank();
  Eigen::MatrixXd G(A.measurements(), r);
  for (Index a = 0; a < r; ++a) {
    G.col(a) =
        A.apply(DenseMatrix(S.left.col(a) * S.right.col(a).transpose()));
  }

  // CG on the normal equations in coefficient space; from c = 0 the iterates
  // stay in range(G^T), so duplicated atoms of a raw union resolve to the
  // least-norm combination
  RestrictedLsResult result;
  Eigen::VectorXd c = Eigen::VectorXd::Zero(r);
  Eigen::VectorXd resid = G.transpose() * y;
  Eigen::VectorXd p = resid;
  double rr = resid.squaredNorm();
  const double stop = cg_tol * std::max(1.0, y.norm());
  double top_curvature = 0.0;

  result.converged = std::sqrt(rr) <= stop;
  while (!result.converged && result.iterations < cg_maxiter) {
    Eigen::VectorXd Gp = G * p;
    const double pAp = Gp.squaredNorm();
    const double curvature = pAp / p.squaredNorm();
    top_curvature = std::max(top_curvature, curvature);
    if (!(curvature > 1e-14 * top_curvature)) {
      result.rank_deficient = true;  // A is flat along this direction
      break;
    }
    const double alpha = rr / pAp;
    c += alpha * p;
    resid -= alpha * (G.transpose() * Gp);
    const double rr_new = resid.squaredNorm();
    ++result.iterations;
    if (std::sqrt(rr_new) <= stop) {
      result.converged = true;
      break;
    }
    p = resid + (rr_new / rr) * p;
    rr = rr_new;
  }

  DenseMatrix V = DenseMatrix::Zero(S.signal_rows(), S.signal_cols());
  for (Index a = 0; a < r; ++a) {
    V += c[a] * DenseMatrix(S.left.col(a) * S.right.col(a).transpose());
  }
  result.solution = std::move(V);
  return result;
}

bool stopping_check(const DenseMatrix& X_cur, const DenseMatrix& X_prev,
                    double tol) {
  const double diff = (X_cur - X_prev).norm();
  const double scale = X_cur.norm();
  if (scale == 0.0) return diff <= tol;
  return diff <= tol * scale;
}

std::pair<DenseMatrix, RunReport> solve(const LinearOperator& A, const Vector& y,
                                        const SolverConfig& config,
                                        const DenseMatrix* X_true) {
  return SolverRun(A, y, config, X_true).run();
}

}  // namespace malps
