#ifndef FREQNEURO_TESTS_TEST_UTIL_HPP_
#define FREQNEURO_TESTS_TEST_UTIL_HPP_

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <random>
#include <span>
#include <vector>

namespace freqneuro::testing {

inline std::vector<double> random_vector(std::mt19937_64& rng, std::size_t n, double lo = -10.0,
                                         double hi = 10.0) {
  std::uniform_real_distribution<double> dist(lo, hi);
  std::vector<double> v(n);
  for (double& x : v) x = dist(rng);
  return v;
}

inline std::vector<std::size_t> random_dims(std::mt19937_64& rng, std::size_t max_rank,
                                            std::size_t max_extent) {
  std::uniform_int_distribution<std::size_t> rank(1, max_rank);
  std::uniform_int_distribution<std::size_t> extent(1, max_extent);
  std::vector<std::size_t> dims(rank(rng));
  for (auto& d : dims) d = extent(rng);
  return dims;
}

inline double max_abs_diff(std::span<const double> a, std::span<const double> b) {
  double worst = 0.0;
  for (std::size_t i = 0; i < a.size(); ++i) worst = std::max(worst, std::abs(a[i] - b[i]));
  return a.size() == b.size() ? worst : INFINITY;
}

}  // namespace freqneuro::testing

#endif  // FREQNEURO_TESTS_TEST_UTIL_HPP_
