#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "malps/types.hpp"

#include "json.hpp"

namespace malps {

struct IterationRecord {
  int iter = 0;
  double rel_change = 0.0;
  double f_value = 0.0;
  double err_vs_truth = 0.0;  // NaN when no ground truth was supplied
  double elapsed_ms = 0.0;    // cumulative since solve start
};

struct TrialRecord {
  int iterations = 0;
  double final_error = 0.0;  // ||Xhat - X*||_F / ||X*||_F, NaN without truth
  double wall_seconds = 0.0;
  bool diverged = false;
  std::string note;
  std::vector<IterationRecord> trace;
};

// Per-configuration run record: one entry per trial plus Monte-Carlo medians.
// Medians of an even count average the two middle values; NaN sorts last.
struct RunReport {
  std::string algorithm;
  Index m = 0;
  Index n = 0;
  int k = 0;
  double noise_energy = 0.0;
  double sampling_ratio = 0.0;
  double freedom_ratio = 0.0;
  std::uint64_t seed = 0;
  std::vector<TrialRecord> trials;

  double median_iterations() const;
  double median_error() const;
  double median_seconds() const;
  bool any_diverged() const;

  nlohmann::json to_json() const;
  // one row per iteration: trial,iter,rel_change,f_value,err_vs_truth,elapsed_ms
  std::string to_csv() const;
  // deterministic content fingerprint; wall-clock fields are excluded since
  // they can never be bit-identical across runs
  std::string signature() const;
};

double median(std::vector<double> values);

}  // namespace malps
