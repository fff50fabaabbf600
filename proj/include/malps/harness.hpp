#pragma once

#include <string>
#include <vector>

#include "malps/operators.hpp"
#include "malps/solver.hpp"

namespace malps {

// One synthetic recovery problem family: X* = L R^T / ||L R^T||_F with iid
// Gaussian factors, p = floor(SR * m * n) measurements, Gaussian noise scaled
// to the requested energy.
struct ProblemSpec {
  Index m = 0;
  Index n = 0;
  int k_true = 1;
  double sampling_ratio = 0.3;
  double noise_energy = 0.0;
  OperatorKind operator_kind = OperatorKind::mask;
  int trials = 10;
  std::uint64_t seed = 0;

  Index measurement_count() const;
  double freedom_ratio() const;  // k (m + n - k) / p
};

struct Problem {
  DenseMatrix x_true;
  LinearOperator op;
  Observation obs;
};

Problem generate_problem(const ProblemSpec& spec);

// Runs every config against the same problem realization per trial; trial t
// derives its seed from (spec.seed, t) so the schedule never affects results.
// Divergence is recorded per trial, not fatal. threads = 0 picks the hardware
// concurrency.
std::vector<RunReport> run_monte_carlo(const ProblemSpec& spec,
                                       const std::vector<SolverConfig>& configs,
                                       int threads = 0);

// 5x4 rank-2 completion example with the fixed observation pattern; solves
// with k = 2 for 300 iterations and returns the elementwise-rounded recovery.
DenseMatrix run_toy_example(Algorithm algo);
DenseMatrix toy_example_truth();

struct DenoiseResult {
  DenseMatrix estimate;
  double snr_db = 0.0;
  RunReport report;
};

// Grayscale denoising from a uniformly sampled subset of pixels (binary PGM,
// maxval 255). SNR = 20 log10(||X_ref||_F / ||Xhat - X_ref||_F). With
// rank_reference the pixels are observed from -- and the error measured
// against -- the best rank-k approximation of the image.
DenoiseResult denoise_image(const std::string& path, int k,
                            double observe_fraction, SolverConfig config,
                            std::uint64_t seed, bool rank_reference = false);

enum class TableFormat { csv, text };

// Table rows (m, n, k, noise, FR, algorithm, median iter, median err,
// median time) in CSV or aligned text.
std::string emit_table(const std::vector<RunReport>& reports, TableFormat fmt);

}  // namespace malps
