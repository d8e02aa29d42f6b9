#pragma once

#include <cstddef>
#include <cstdint>
#include <initializer_list>
#include <random>
#include <vector>

namespace mvref {

/// SplitMix64 finalizer folded over the parts; derives independent stream
/// seeds from a master seed and a key such as (view, point).
std::uint64_t mix_seed(std::uint64_t seed, std::initializer_list<std::uint64_t> parts);

/// Seeded generator whose output sequence is identical on every platform.
/// std::mt19937_64 is fully specified by the standard; the distributions on
/// top of it are not, so they are written out here.
class Rng {
 public:
  explicit Rng(std::uint64_t seed) : engine_(seed) {}

  std::uint64_t next() { return engine_(); }
  /// Uniform on [0, 1) with 53 random bits.
  double uniform() { return static_cast<double>(engine_() >> 11) * 0x1.0p-53; }
  double uniform(double lo, double hi) { return lo + (hi - lo) * uniform(); }
  /// Uniform integer on [0, n), rejection-sampled (no modulo bias).
  std::size_t index(std::size_t n);
  /// Standard normal via Box-Muller; caches the second variate.
  double normal();

 private:
  std::mt19937_64 engine_;
  bool has_spare_ = false;
  double spare_ = 0.0;
};

/// C(n, k), saturating at UINT64_MAX.
std::uint64_t binomial(std::size_t n, std::size_t k);

/// Advances a sorted k-combination of {0..n-1} in lexicographic order;
/// returns false after the last one.
bool next_combination(std::vector<std::size_t>& combo, std::size_t n);

/// Up to `cap` distinct sorted k-subsets of {0..n-1}. When C(n, k) <= cap all
/// subsets are returned in lexicographic order; otherwise `cap` distinct
/// subsets are drawn uniformly, in draw order.
std::vector<std::vector<std::size_t>> sample_subsets(std::size_t n, std::size_t k,
                                                     std::size_t cap, Rng& rng);

}  // namespace mvref
