#pragma once

#include <cmath>
#include <cstdint>
#include <random>
#include <unordered_map>
#include <vector>

namespace malps {

// Derives an independent stream seed from (seed, salt); splitmix64 finalizer.
inline std::uint64_t mix_seed(std::uint64_t seed, std::uint64_t salt) {
  std::uint64_t z = seed + 0x9e3779b97f4a7c15ULL * (salt + 1);
  z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ULL;
  z = (z ^ (z >> 27)) * 0x94d049bb133111ebULL;
  return z ^ (z >> 31);
}

// Seeded generator with self-contained variate transforms. std::mt19937_64 is
// fully specified by the standard; the distributions in <random> are not, so
// uniform/gaussian draws are implemented here to keep runs reproducible.
class Rng {
 public:
  explicit Rng(std::uint64_t seed) : engine_(seed) {}

  // uniform double in [0, 1), 53-bit resolution
  double uniform() {
    return static_cast<double>(engine_() >> 11) * 0x1.0p-53;
  }

  // standard normal via Box-Muller, one cached mate
  double gaussian() {
    if (has_spare_) {
      has_spare_ = false;
      return spare_;
    }
    double u1 = 0.0;
    do {
      u1 = uniform();
    } while (u1 <= 0.0);
    const double u2 = uniform();
    const double r = std::sqrt(-2.0 * std::log(u1));
    const double theta = 6.283185307179586476925286766559 * u2;
    spare_ = r * std::sin(theta);
    has_spare_ = true;
    return r * std::cos(theta);
  }

  // uniform integer in [0, bound); rejection sampling, bound > 0
  std::uint64_t below(std::uint64_t bound) {
    const std::uint64_t limit = std::uint64_t(-1) - std::uint64_t(-1) % bound;
    std::uint64_t x;
    do {
      x = engine_();
    } while (x >= limit);
    return x % bound;
  }

  int sign() { return (engine_() & 1u) ? 1 : -1; }

  // p distinct indices from {0, ..., n-1}; Fisher-Yates over a virtual range
  // so only O(p) state is touched
  std::vector<std::size_t> sample_without_replacement(std::size_t n, std::size_t p) {
    std::unordered_map<std::size_t, std::size_t> swapped;
    swapped.reserve(2 * p);
    std::vector<std::size_t> out;
    out.reserve(p);
    for (std::size_t i = 0; i < p; ++i) {
      const std::size_t j = i + static_cast<std::size_t>(below(n - i));
      const auto it_j = swapped.find(j);
      const std::size_t value_j = (it_j == swapped.end()) ? j : it_j->second;
      const auto it_i = swapped.find(i);
      const std::size_t value_i = (it_i == swapped.end()) ? i : it_i->second;
      out.push_back(value_j);
      swapped[j] = value_i;
    }
    return out;
  }

  std::vector<std::size_t> permutation(std::size_t n) {
    std::vector<std::size_t> perm(n);
    for (std::size_t i = 0; i < n; ++i) perm[i] = i;
    for (std::size_t i = 0; i + 1 < n; ++i) {
      const std::size_t j = i + static_cast<std::size_t>(below(n - i));
      std::swap(perm[i], perm[j]);
    }
    return perm;
  }

 private:
  std::mt19937_64 engine_;
  double spare_ = 0.0;
  bool has_spare_ = false;
};

}  // namespace malps
