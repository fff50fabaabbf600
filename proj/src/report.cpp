#include "malps/report.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <cstring>
#include <limits>
#include <sstream>

namespace malps {

double median(std::vector<double> values) {
  if (values.empty()) return std::numeric_limits<double>::quiet_NaN();
  // NaN (diverged / no-truth entries) sorts last so it only surfaces when the
  // majority of trials failed
  std::sort(values.begin(), values.end(), [](double a, double b) {
    if (std::isnan(a)) return false;
    if (std::isnan(b)) return true;
    return a < b;
  });
  const std::size_t n = values.size();
  if (n % 2 == 1) return values[n / 2];
  return 0.5 * (values[n / 2 - 1] + values[n / 2]);
}

double RunReport::median_iterations() const {
  std::vector<double> v;
  v.reserve(trials.size());
  for (const auto& t : trials) v.push_back(static_cast<double>(t.iterations));
  return median(std::move(v));
}

double RunReport::median_error() const {
  std::vector<double> v;
  v.reserve(trials.size());
  for (const auto& t : trials) v.push_back(t.final_error);
  return median(std::move(v));
}

double RunReport::median_seconds() const {
  std::vector<double> v;
  v.reserve(trials.size());
  for (const auto& t : trials) v.push_back(t.wall_seconds);
  return median(std::move(v));
}

bool RunReport::any_diverged() const {
  return std::any_of(trials.begin(), trials.end(),
                     [](const TrialRecord& t) { return t.diverged; });
}

namespace {

nlohmann::json number_or_null(double v) {
  if (std::isfinite(v)) return v;
  return nullptr;
}

}  // namespace

nlohmann::json RunReport::to_json() const {
  nlohmann::json doc{
      {"algorithm", algorithm},
      {"m", m},
      {"n", n},
      {"k", k},
      {"noise_energy", noise_energy},
      {"sampling_ratio", sampling_ratio},
      {"freedom_ratio", freedom_ratio},
      {"seed", seed},
      {"median_iterations", number_or_null(median_iterations())},
      {"median_error", number_or_null(median_error())},
      {"median_seconds", number_or_null(median_seconds())},
  };
  doc["trials"] = nlohmann::json::array();
  for (const auto& t : trials) {
    nlohmann::json trial{
        {"iterations", t.iterations},
        {"final_error", number_or_null(t.final_error)},
        {"wall_seconds", t.wall_seconds},
        {"diverged", t.diverged},
    };
    if (!t.note.empty()) trial["note"] = t.note;
    trial["trace"] = nlohmann::json::array();
    for (const auto& r : t.trace) {
      trial["trace"].push_back({{"iter", r.iter},
                                {"rel_change", number_or_null(r.rel_change)},
                                {"f_value", number_or_null(r.f_value)},
                                {"err_vs_truth", number_or_null(r.err_vs_truth)},
                                {"elapsed_ms", r.elapsed_ms}});
    }
    doc["trials"].push_back(std::move(trial));
  }
  return doc;
}

std::string RunReport::to_csv() const {
  std::ostringstream out;
  out << "trial,iter,rel_change,f_value,err_vs_truth,elapsed_ms\n";
  char buf[160];
  for (std::size_t t = 0; t < trials.size(); ++t) {
    for (const auto& r : trials[t].trace) {
      std::snprintf(buf, sizeof(buf), "%zu,%d,%.17g,%.17g,%.17g,%.3f\n", t,
                    r.iter, r.rel_change, r.f_value, r.err_vs_truth, r.elapsed_ms);
      out << buf;
    }
  }
  return out.str();
}

std::string RunReport::signature() const {
  std::ostringstream out;
  const auto hex = [&out](double v) {
    std::uint64_t bits;
    std::memcpy(&bits, &v, sizeof(bits));
    char buf[24];
    std::snprintf(buf, sizeof(buf), "%016llx",
                  static_cast<unsigned long long>(bits));
    out << buf << ';';
  };
  out << algorithm << ';' << m << 'x' << n << ';' << k << ';' << seed << ';';
  for (const auto& t : trials) {
    out << t.iterations << ';' << (t.diverged ? 'D' : '.') << ';';
    hex(t.final_error);
    for (const auto& r : t.trace) {
      hex(r.rel_change);
      hex(r.f_value);
      hex(r.err_vs_truth);
    }
  }
  return out.str();
}

}  // namespace malps
