#include "doctest.h"

#include "malps/harness.hpp"
#include "malps/solver.hpp"
#include "oracles.hpp"
#include "test_helpers.hpp"

using namespace malps;

namespace {

struct Instance {
  LinearOperator op;
  Vector y;
  DenseMatrix x_true;
};

Instance mask_instance(Index m, Index n, int k, double sr, std::uint64_t seed) {
  ProblemSpec spec;
  spec.m = m;
  spec.n = n;
  spec.k_true = k;
  spec.sampling_ratio = sr;
  spec.operator_kind = OperatorKind::mask;
  spec.seed = seed;
  Problem p = generate_problem(spec);
  return Instance{std::move(p.op), std::move(p.obs.y), std::move(p.x_true)};
}

Instance structured_instance(Index m, Index n, int k, double sr,
                             std::uint64_t seed) {
  ProblemSpec spec;
  spec.m = m;
  spec.n = n;
  spec.k_true = k;
  spec.sampling_ratio = sr;
  spec.operator_kind = OperatorKind::structured;
  spec.seed = seed;
  Problem p = generate_problem(spec);
  return Instance{std::move(p.op), std::move(p.obs.y), std::move(p.x_true)};
}

}  // namespace

TEST_CASE("step size is exactly one under the identity operator") {
  const LinearOperator A = LinearOperator::identity(6, 5);
  const SubspaceBasis S = testutil::random_basis(6, 5, 2, 3);
  const DenseMatrix grad = testutil::random_matrix(6, 5, 4);
  const auto mu = step_size_mu(A, S, grad);
  REQUIRE(mu.has_value());
  CHECK(*mu == doctest::Approx(1.0).epsilon(1e-12));
}

TEST_CASE("step size matches a golden-section line search") {
  for (int rep = 0; rep < 100; ++rep) {
    const auto inst = mask_instance(8, 7, 2, 0.6, 100 + rep);
    const DenseMatrix X = testutil::random_rank_k(8, 7, 2, 200 + rep);
    const DenseMatrix grad = inst.op.gradient(inst.y, X);
    const SubspaceBasis S = testutil::random_basis(8, 7, 3, 300 + rep);
    const DenseMatrix pg = project_subspace(S, grad);
    const auto mu = step_size_mu(inst.op, S, grad);
    REQUIRE(mu.has_value());

    const auto objective = [&](double t) {
      return (inst.y - inst.op.apply(DenseMatrix(X - 0.5 * t * pg))).squaredNorm();
    };
    const double oracle = oracles::golden_section(objective, 0.0, 10.0, 1e-10);
    CHECK(std::abs(*mu - oracle) <= 1e-6 * std::max(1.0, std::abs(oracle)));
    // 1-D dominance across the bracket
    Rng rng(400 + rep);
    for (int probe = 0; probe < 20; ++probe) {
      const double t = rng.uniform() * 2.0 * (*mu);
      CHECK(objective(*mu) <= objective(t) + 1e-9);
    }
  }
}

TEST_CASE("zero projected gradient signals convergence") {
  const LinearOperator A = LinearOperator::identity(4, 4);
  const SubspaceBasis S = testutil::random_basis(4, 4, 2, 5);
  CHECK_FALSE(step_size_mu(A, S, DenseMatrix::Zero(4, 4)).has_value());
}

TEST_CASE("adaptive momentum is zero at zero residual or zero motion") {
  MomentumPolicy policy;  // adaptive
  double alpha = 0.5;
  const Vector y = Vector::Ones(5);
  const Vector prev = Vector::Zero(5);
  CHECK(momentum_tau(policy, y, y, prev, alpha) == 0.0);  // y - AX = 0
  CHECK(momentum_tau(policy, y, prev, prev, alpha) == 0.0);  // stalled
}

TEST_CASE("adaptive momentum matches a golden-section line search") {
  for (int rep = 0; rep < 100; ++rep) {
    const auto inst = mask_instance(8, 7, 2, 0.6, 500 + rep);
    const DenseMatrix Xc = testutil::random_rank_k(8, 7, 2, 600 + rep);
    const DenseMatrix Xp = testutil::random_rank_k(8, 7, 2, 700 + rep);
    const Vector axc = inst.op.apply(Xc);
    const Vector axp = inst.op.apply(Xp);
    MomentumPolicy policy;
    double alpha = 0.5;
    const double tau = momentum_tau(policy, inst.y, axc, axp, alpha);

    const auto objective = [&](double t) {
      return (inst.y - inst.op.apply(DenseMatrix(Xc + t * (Xc - Xp)))).squaredNorm();
    };
    const double oracle = oracles::golden_section(objective, -10.0, 10.0, 1e-10);
    CHECK(std::abs(tau - oracle) <= 1e-6 * std::max(1.0, std::abs(oracle)));
  }
}

TEST_CASE("nesterov recursion closed form at q = 1") {
  MomentumPolicy policy;
  policy.kind = MomentumPolicy::Kind::nesterov_q;
  policy.q = 1.0;
  policy.alpha0 = 0.5;
  double alpha = policy.alpha0;
  const Vector dummy = Vector::Zero(3);
  const double tau0 = momentum_tau(policy, dummy, dummy, dummy, alpha);
  // alpha_1 solves a^2 + (0.25 - 1) a - 0.25 = 0 -> a = (0.75 + sqrt(1.5625))/2
  const double alpha1 = 0.5 * (0.75 + std::sqrt(0.5625 + 1.0));
  CHECK(alpha == doctest::Approx(alpha1).epsilon(1e-15));
  CHECK(tau0 == doctest::Approx(0.5 * 0.5 / (0.25 + alpha1)).epsilon(1e-15));
}

TEST_CASE("constant momentum validates its range") {
  MomentumPolicy policy;
  policy.kind = MomentumPolicy::Kind::constant;
  policy.tau = 0.25;
  double alpha = 0.5;
  const Vector dummy = Vector::Zero(3);
  CHECK(momentum_tau(policy, dummy, dummy, dummy, alpha) == 0.25);
  policy.tau = 1.0;
  CHECK_THROWS_AS(momentum_tau(policy, dummy, dummy, dummy, alpha),
                  std::invalid_argument);
}

TEST_CASE("restricted least squares recovers a consistent in-span signal") {
  const auto inst = mask_instance(8, 8, 2, 0.9, 900);
  const auto [basis, X0] = best_rank_k(inst.x_true, 2);
  const Vector y = inst.op.apply(X0);
  const auto result = restricted_least_squares(inst.op, y, basis, 500, 1e-12);
  CHECK(result.converged);
  CHECK((inst.op.apply(result.solution) - y).norm() <= 1e-8);
}

TEST_CASE("restricted least squares matches a dense normal-equations solve") {
  const auto inst = mask_instance(6, 6, 2, 0.8, 901);
  const SubspaceBasis S = testutil::random_basis(6, 6, 2, 902);
  const auto result = restricted_least_squares(inst.op, inst.y, S, 500, 1e-12);

  // dense route: expand the atoms u_i v_i^T in vectorized coordinates and
  // solve the small normal equations directly
  Eigen::MatrixXd G(inst.op.measurements(), S.rank());
  for (Index a = 0; a < S.rank(); ++a) {
    G.col(a) = inst.op.apply(
        DenseMatrix(S.left.col(a) * S.right.col(a).transpose()));
  }
  const Eigen::VectorXd c =
      (G.transpose() * G).ldlt().solve(G.transpose() * inst.y);
  DenseMatrix oracle = DenseMatrix::Zero(6, 6);
  for (Index a = 0; a < S.rank(); ++a) {
    oracle += c[a] * DenseMatrix(S.left.col(a) * S.right.col(a).transpose());
  }
  CHECK((result.solution - oracle).norm() <= 1e-8);
}

TEST_CASE("restricted least squares requires a nonempty subspace") {
  const auto inst = mask_instance(6, 6, 2, 0.8, 903);
  CHECK_THROWS_AS(restricted_least_squares(inst.op, inst.y,
                                           SubspaceBasis::empty(6, 6), 10, 1e-8),
                  std::invalid_argument);
}

TEST_CASE("stopping check boundary semantics") {
  DenseMatrix X = DenseMatrix::Zero(2, 2);
  X(0, 0) = 1.0;  // unit Frobenius norm
  CHECK(stopping_check(X, X, 1e-5));

  DenseMatrix Y = X;
  Y(1, 1) = 1e-5;  // relative change is exactly tol
  CHECK((Y - X).norm() == 1e-5);
  CHECK(stopping_check(X, Y, 1e-5));
  CHECK_FALSE(stopping_check(X, Y, 0.99e-5));

  // zero estimate falls back to the absolute comparison
  CHECK(stopping_check(DenseMatrix::Zero(2, 2), DenseMatrix::Zero(2, 2), 1e-9));
}

TEST_CASE("every algorithm returns zero for zero observations in one iteration") {
  const LinearOperator A = LinearOperator::mask(6, 6, 12, 42);
  const Vector y = Vector::Zero(12);
  for (Algorithm algo : {Algorithm::alps1, Algorithm::alps1_nodebias,
                         Algorithm::admira, Algorithm::alps2, Algorithm::alps2_qr,
                         Algorithm::svp}) {
    SolverConfig cfg;
    cfg.algorithm = algo;
    cfg.k = 2;
    const auto [estimate, report] = solve(A, y, cfg);
    CHECK(estimate.norm() == 0.0);
    CHECK(report.trials.front().iterations == 1);
  }
}

TEST_CASE("iterates keep rank at most k") {
  const auto inst = structured_instance(16, 16, 2, 0.5, 77);
  for (Algorithm algo : {Algorithm::alps1, Algorithm::admira, Algorithm::alps2,
                         Algorithm::svp}) {
    for (int iters = 1; iters <= 4; ++iters) {
      SolverConfig cfg;
      cfg.algorithm = algo;
      cfg.k = 2;
      cfg.max_iters = iters;  // deterministic prefix of the same run
      cfg.tol = 1e-14;
      const auto [estimate, report] = solve(inst.op, inst.y, cfg, &inst.x_true);
      CHECK(testutil::matrix_rank_tail(estimate, 2) <= 1e-8);
    }
  }
}

TEST_CASE("de-bias gradient step never increases the data error") {
  for (int rep = 0; rep < 100; ++rep) {
    const auto inst = mask_instance(8, 7, 2, 0.7, 1100 + rep);
    const DenseMatrix V = testutil::random_matrix(8, 7, 1200 + rep);
    const auto [W_basis, W] = best_rank_k(V, 2);
    const DenseMatrix grad_w = inst.op.gradient(inst.y, W);
    const DenseMatrix pgw = project_subspace(W_basis, grad_w);
    const auto xi = step_size_mu(inst.op, W_basis, grad_w);
    if (!xi) continue;
    const DenseMatrix debiased = W - 0.5 * (*xi) * pgw;
    const double before = (inst.y - inst.op.apply(W)).squaredNorm();
    const double after = (inst.y - inst.op.apply(debiased)).squaredNorm();
    CHECK(after <= before + 1e-9);
  }
}

TEST_CASE("admira leaves a near-zero projected residual after its inner solve") {
  const auto inst = mask_instance(10, 9, 2, 0.7, 1300);
  const SubspaceBasis S = testutil::random_basis(10, 9, 4, 1301);
  const auto result = restricted_least_squares(inst.op, inst.y, S, 500, 1e-10);
  REQUIRE(result.converged);
  // optimality in atom coordinates: the residual is orthogonal to every
  // A(u_i v_i^T)
  const Vector resid = inst.y - inst.op.apply(result.solution);
  for (Index a = 0; a < S.rank(); ++a) {
    const double g = inst.op
                         .apply(DenseMatrix(S.left.col(a) *
                                            S.right.col(a).transpose()))
                         .dot(resid);
    CHECK(std::abs(g) <= 1e-10 * std::max(1.0, inst.y.norm()));
  }
}

TEST_CASE("all solvers recover a well-conditioned structured instance") {
  const std::vector<Algorithm> algos = {Algorithm::alps1, Algorithm::admira,
                                        Algorithm::alps2, Algorithm::alps2_qr,
                                        Algorithm::svp};
  std::vector<int> successes(algos.size(), 0);
  for (int seed = 0; seed < 10; ++seed) {
    const auto inst = structured_instance(64, 64, 2, 0.4, 4000 + seed);
    for (std::size_t a = 0; a < algos.size(); ++a) {
      SolverConfig cfg;
      cfg.algorithm = algos[a];
      cfg.k = 2;
      const auto [estimate, report] = solve(inst.op, inst.y, cfg, &inst.x_true);
      if (report.trials.front().final_error <= 1e-3) ++successes[a];
    }
  }
  for (std::size_t a = 0; a < algos.size(); ++a) {
    INFO("algorithm ", to_string(algos[a]));
    CHECK(successes[a] >= 9);
  }
}

TEST_CASE("raw and ortho unions reach the same solution") {
  const auto inst = structured_instance(32, 32, 2, 0.5, 4100);
  SolverConfig cfg;
  cfg.algorithm = Algorithm::alps2;
  cfg.k = 2;
  cfg.union_mode = UnionMode::raw;
  const auto raw = solve(inst.op, inst.y, cfg, &inst.x_true);
  cfg.union_mode = UnionMode::ortho;
  const auto ortho = solve(inst.op, inst.y, cfg, &inst.x_true);
  const double a = raw.second.trials.front().final_error;
  const double b = ortho.second.trials.front().final_error;
  CHECK(a <= 1e-3);
  CHECK(b <= 1e-3);
  CHECK(std::max(a, b) <= 10.0 * std::max(1e-12, std::min(a, b)) + 1e-9);
}

TEST_CASE("left-inexact projection mode still converges") {
  const auto inst = mask_instance(24, 48, 2, 0.5, 4200);
  SolverConfig cfg;
  cfg.algorithm = Algorithm::alps2;
  cfg.k = 2;
  cfg.projection_mode = ProjectionMode::left_inexact;
  const auto [estimate, report] = solve(inst.op, inst.y, cfg, &inst.x_true);
  CHECK(report.trials.front().final_error <= 1e-3);
}

TEST_CASE("svp with an aggressive constant step diverges loudly") {
  const auto inst = structured_instance(16, 16, 2, 0.4, 4300);
  SolverConfig cfg;
  cfg.algorithm = Algorithm::svp;
  cfg.k = 2;
  cfg.svp_mu = 50.0;
  CHECK_THROWS_AS(solve(inst.op, inst.y, cfg, &inst.x_true), DivergenceError);
}

TEST_CASE("identical configs and seeds give bit-identical reports") {
  const auto inst = structured_instance(24, 24, 2, 0.5, 4400);
  SolverConfig cfg;
  cfg.algorithm = Algorithm::alps2_qr;
  cfg.k = 2;
  cfg.seed = 99;
  const auto a = solve(inst.op, inst.y, cfg, &inst.x_true);
  const auto b = solve(inst.op, inst.y, cfg, &inst.x_true);
  CHECK(a.second.signature() == b.second.signature());
  CHECK((a.first - b.first).norm() == 0.0);
}

TEST_CASE("solver trace length equals the iteration count") {
  const auto inst = mask_instance(16, 16, 2, 0.6, 4500);
  SolverConfig cfg;
  cfg.algorithm = Algorithm::alps2;
  cfg.k = 2;
  const auto [estimate, report] = solve(inst.op, inst.y, cfg, &inst.x_true);
  const auto& trial = report.trials.front();
  CHECK(trial.trace.size() == static_cast<std::size_t>(trial.iterations));
  // rel_change column is what the stopping rule consumed
  CHECK(trial.trace.back().rel_change <= cfg.tol);
}
