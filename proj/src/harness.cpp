#include "malps/harness.hpp"

#include <algorithm>
#include <atomic>
#include <cmath>
#include <cstdio>
#include <limits>
#include <mutex>
#include <sstream>
#include <stdexcept>
#include <thread>

#include "malps/pgm.hpp"
#include "malps/rng.hpp"
#include "malps/svd.hpp"

namespace malps {

Index ProblemSpec::measurement_count() const {
  return static_cast<Index>(sampling_ratio * static_cast<double>(m * n));
}

double ProblemSpec::freedom_ratio() const {
  return static_cast<double>(k_true) * static_cast<double>(m + n - k_true) /
         static_cast<double>(measurement_count());
}

Problem generate_problem(const ProblemSpec& spec) {
  if (spec.m < 1 || spec.n < 1 || spec.k_true < 1 ||
      spec.k_true > std::min(spec.m, spec.n)) {
    throw std::invalid_argument("problem spec: invalid dimensions");
  }
  if (spec.sampling_ratio <= 0.0 || spec.sampling_ratio > 1.0) {
    throw std::invalid_argument("problem spec: SR must lie in (0, 1]");
  }
  if (spec.noise_energy < 0.0) {
    throw std::invalid_argument("problem spec: negative noise energy");
  }
  const Index p = spec.measurement_count();
  if (p < 1) throw std::invalid_argument("problem spec: SR*m*n < 1");

  // X* = L R^T / ||L R^T||_F with iid Gaussian factors; regenerate on the
  // measure-zero event that the product loses rank
  Rng rng(mix_seed(spec.seed, 0x5167));
  DenseMatrix x_true;
  for (int attempt = 0; attempt < 64; ++attempt) {
    Eigen::MatrixXd L(spec.m, spec.k_true);
    Eigen::MatrixXd R(spec.n, spec.k_true);
    for (Index r = 0; r < L.rows(); ++r)
      for (Index c = 0; c < L.cols(); ++c) L(r, c) = rng.gaussian();
    for (Index r = 0; r < R.rows(); ++r)
      for (Index c = 0; c < R.cols(); ++c) R(r, c) = rng.gaussian();
    x_true = L * R.transpose();
    const double norm = x_true.norm();
    if (norm <= 0.0) continue;
    x_true /= norm;
    const SvdFactors f = svd(x_true);
    if (f.sigma[spec.k_true - 1] > 1e-12) break;
  }

  LinearOperator op =
      spec.operator_kind == OperatorKind::structured
          ? LinearOperator::structured(spec.m, spec.n, p, mix_seed(spec.seed, 0xA0))
          : LinearOperator::mask(spec.m, spec.n, p, mix_seed(spec.seed, 0xA0));

  Vector y = op.apply(x_true);
  if (spec.noise_energy > 0.0) {
    Rng noise_rng(mix_seed(spec.seed, 0x4E01));
    Vector eps(p);
    for (Index i = 0; i < p; ++i) eps[i] = noise_rng.gaussian();
    const double norm = eps.norm();
    if (norm > 0.0) eps *= spec.noise_energy / norm;
    y += eps;
  }
  return Problem{std::move(x_true), std::move(op),
                 Observation{std::move(y), spec.noise_energy}};
}

std::vector<RunReport> run_monte_carlo(const ProblemSpec& spec,
                                       const std::vector<SolverConfig>& configs,
                                       int threads) {
  if (spec.trials < 1) throw std::invalid_argument("run_monte_carlo: trials < 1");
  if (configs.empty()) return {};

  std::vector<RunReport> reports(configs.size());
  for (std::size_t c = 0; c < configs.size(); ++c) {
    reports[c].algorithm = to_string(configs[c].algorithm);
    reports[c].m = spec.m;
    reports[c].n = spec.n;
    reports[c].k = configs[c].k;
    reports[c].noise_energy = spec.noise_energy;
    reports[c].sampling_ratio = spec.sampling_ratio;
    reports[c].freedom_ratio = spec.freedom_ratio();
    reports[c].seed = spec.seed;
    reports[c].trials.resize(spec.trials);
  }

  // Trial t derives everything from (seed, t): every config sees the same
  // problem realization and the schedule cannot influence any result.
  auto run_trial = [&](int t) {
    ProblemSpec trial_spec = spec;
    trial_spec.seed = mix_seed(spec.seed, static_cast<std::uint64_t>(t));
    const Problem problem = generate_problem(trial_spec);
    for (std::size_t c = 0; c < configs.size(); ++c) {
      SolverConfig cfg = configs[c];
      cfg.seed = mix_seed(cfg.seed ^ trial_spec.seed, 0xC0);
      TrialRecord record;
      try {
        auto [estimate, report] =
            solve(problem.op, problem.obs.y, cfg, &problem.x_true);
        record = std::move(report.trials.front());
      } catch (const DivergenceError& e) {
        record.diverged = true;
        record.iterations = e.iteration();
        record.final_error = std::numeric_limits<double>::quiet_NaN();
        record.note = e.what();
      }
      reports[c].trials[static_cast<std::size_t>(t)] = std::move(record);
    }
  };

  int worker_count = threads > 0
                         ? threads
                         : static_cast<int>(std::thread::hardware_concurrency());
  worker_count = std::max(1, std::min(worker_count, spec.trials));
  if (worker_count == 1) {
    for (int t = 0; t < spec.trials; ++t) run_trial(t);
  } else {
    std::atomic<int> next{0};
    std::exception_ptr failure;
    std::mutex failure_mutex;
    std::vector<std::thread> pool;
    pool.reserve(static_cast<std::size_t>(worker_count));
    for (int w = 0; w < worker_count; ++w) {
      pool.emplace_back([&]() {
        try {
          for (int t = next.fetch_add(1); t < spec.trials;
               t = next.fetch_add(1)) {
            run_trial(t);
          }
        } catch (...) {
          const std::lock_guard<std::mutex> lock(failure_mutex);
          if (!failure) failure = std::current_exception();
        }
      });
    }
    for (auto& th : pool) th.join();
    if (failure) std::rethrow_exception(failure);
  }
  return reports;
}

DenseMatrix toy_example_truth() {
  DenseMatrix X(5, 4);
  X << 2, 2, 1, 1,
       2, 2, 1, 1,
       2, 2, 1, 1,
       2, 2, 1, 1,
       1, 1, 2, 1;
  return X;
}

DenseMatrix run_toy_example(Algorithm algo) {
  const DenseMatrix truth = toy_example_truth();
  // observation pattern: rows 0, 1, 4 fully known; row 2 only its last entry;
  // row 3 its first and last
  std::vector<std::size_t> hidden = {2 * 4 + 0, 2 * 4 + 1, 2 * 4 + 2,
                                     3 * 4 + 1, 3 * 4 + 2};
  std::vector<std::size_t> observed;
  for (std::size_t idx = 0; idx < 20; ++idx) {
    if (std::find(hidden.begin(), hidden.end(), idx) == hidden.end()) {
      observed.push_back(idx);
    }
  }
  LinearOperator op = LinearOperator::mask_from_indices(5, 4, observed);
  const Vector y = op.apply(truth);

  SolverConfig cfg;
  cfg.algorithm = algo;
  cfg.k = 2;
  cfg.max_iters = 300;
  if (algo == Algorithm::svp) cfg.svp_mu = 1.0;
  // the example admits a continuum of rank-2 interpolators; the constant
  // momentum weight 1/4 lands robustly on the integer one, while the adaptive
  // quotient turns chaotic once the iterate stalls at machine precision
  cfg.momentum.kind = MomentumPolicy::Kind::constant;
  cfg.momentum.tau = 0.25;
  auto [estimate, report] = solve(op, y, cfg);
  return estimate.array().round().matrix();
}

DenoiseResult denoise_image(const std::string& path, int k,
                            double observe_fraction, SolverConfig config,
                            std::uint64_t seed, bool rank_reference) {
  if (observe_fraction <= 0.0 || observe_fraction > 1.0) {
    throw std::invalid_argument("denoise: observe_fraction must lie in (0, 1]");
  }
  DenseMatrix image = read_pgm(path);
  if (k < 1 || k > std::min(image.rows(), image.cols())) {
    throw std::invalid_argument("denoise: rank out of range");
  }
  DenseMatrix reference = image;
  if (rank_reference) {
    reference = best_rank_k(image, k).second;
  }

  const Index p = std::max<Index>(
      1, static_cast<Index>(observe_fraction *
                            static_cast<double>(image.size())));
  LinearOperator op =
      LinearOperator::mask(image.rows(), image.cols(), p, seed);
  const Vector y = op.apply(reference);

  config.k = k;
  auto [estimate, report] = solve(op, y, config, &reference);
  const double err = (estimate - reference).norm();
  const double snr =
      err > 0.0 ? 20.0 * std::log10(reference.norm() / err)
                : std::numeric_limits<double>::infinity();
  return DenoiseResult{std::move(estimate), snr, std::move(report)};
}

std::string emit_table(const std::vector<RunReport>& reports, TableFormat fmt) {
  std::ostringstream out;
  char buf[256];
  if (fmt == TableFormat::csv) {
    out << "m,n,k,noise,FR,algorithm,median_iter,median_err,median_time\n";
    for (const auto& r : reports) {
      std::snprintf(buf, sizeof(buf), "%lld,%lld,%d,%.17g,%.17g,%s,%.17g,%.17g,%.17g\n",
                    static_cast<long long>(r.m), static_cast<long long>(r.n),
                    r.k, r.noise_energy, r.freedom_ratio, r.algorithm.c_str(),
                    r.median_iterations(), r.median_error(), r.median_seconds());
      out << buf;
    }
    return out.str();
  }
  std::snprintf(buf, sizeof(buf), "%6s %6s %4s %9s %6s %-16s %11s %12s %12s\n",
                "m", "n", "k", "noise", "FR", "algorithm", "median_iter",
                "median_err", "median_time");
  out << buf;
  for (const auto& r : reports) {
    std::snprintf(buf, sizeof(buf),
                  "%6lld %6lld %4d %9.2e %6.3f %-16s %11.1f %12.3e %12.3f\n",
                  static_cast<long long>(r.m), static_cast<long long>(r.n), r.k,
                  r.noise_energy, r.freedom_ratio, r.algorithm.c_str(),
                  r.median_iterations(), r.median_error(), r.median_seconds());
    out << buf;
  }
  return out.str();
}

}  // namespace malps
