#include "selftest.hpp"

#include <algorithm>
#include <cmath>
#include <functional>
#include <numeric>
#include <ostream>
#include <random>
#include <string>

#include "freqneuro/dct.hpp"
#include "freqneuro/encoding.hpp"
#include "freqneuro/ordering.hpp"
#include "oracles.hpp"

namespace freqneuro::cli {

namespace {

std::vector<std::size_t> random_dims(std::mt19937_64& rng) {
  std::uniform_int_distribution<std::size_t> rank(1, kMaxRank);
  std::uniform_int_distribution<std::size_t> extent(1, 8);
  std::vector<std::size_t> dims(rank(rng));
  for (auto& d : dims) d = extent(rng);
  return dims;
}

std::vector<double> random_values(std::mt19937_64& rng, std::size_t n) {
  std::uniform_real_distribution<double> u(-10.0, 10.0);
  std::vector<double> v(n);
  for (double& x : v) x = u(rng);
  return v;
}

double max_error(std::span<const double> a, std::span<const double> b) {
  double worst = 0.0;
  for (std::size_t i = 0; i < a.size(); ++i) worst = std::max(worst, std::abs(a[i] - b[i]));
  return worst;
}

struct Check {
  std::string name;
  std::function<double(std::mt19937_64&)> error;  // worst error of one trial
  double tolerance;
};

}  // namespace

int run_selftest(std::ostream& out, std::uint64_t seed, int trials) {
  const std::vector<Check> checks{
      {"dct3_nd vs direct sum",
       [](std::mt19937_64& rng) {
         const auto dims = random_dims(rng);
         const auto c = random_values(rng, validate_dims(dims));
         return max_error(dct3_nd(RealArray(dims, c)).data(), oracle::dct3_nd(dims, c));
       },
       1e-9},
      {"dct2_nd vs direct sum",
       [](std::mt19937_64& rng) {
         const auto dims = random_dims(rng);
         const auto x = random_values(rng, validate_dims(dims));
         return max_error(dct2_nd(RealArray(dims, x)).data(), oracle::dct2_nd(dims, x));
       },
       1e-9},
      {"dct3_nd(dct2_nd(x)) == x",
       [](std::mt19937_64& rng) {
         const auto dims = random_dims(rng);
         RealArray a(dims, random_values(rng, validate_dims(dims)));
         return max_error(dct3_nd(dct2_nd(a)).data(), a.data());
       },
       1e-9},
      {"simplex_order vs transcription",
       [](std::mt19937_64& rng) {
         const auto dims = random_dims(rng);
         return simplex_order(dims).cells == oracle::importance_order(dims) ? 0.0 : 1.0;
       },
       0.5},
      {"decode(encode(w)) == w",
       [](std::mt19937_64& rng) {
         const std::pair<SchemeName, ArchitectureKind> pairs[] = {
             {SchemeName::kPsi1, ArchitectureKind::kTheta1},
             {SchemeName::kPsi2, ArchitectureKind::kTheta1},
             {SchemeName::kPsi3, ArchitectureKind::kTheta2}};
         const auto [name, kind] = pairs[std::uniform_int_distribution<int>(0, 2)(rng)];
         const auto scheme = build_scheme(name, kind, std::uniform_int_distribution<std::size_t>(3, 8)(rng));
         const auto w = NetworkWeights::from_flat(scheme.arch,
                                                  random_values(rng, scheme.arch.weight_count()));
         return max_error(decode(encode(w, scheme), scheme).flatten(), w.flatten());
       },
       1e-9},
  };

  int failures = 0;
  std::mt19937_64 rng(seed);
  for (const auto& check : checks) {
    double worst = 0.0;
    for (int t = 0; t < trials; ++t) worst = std::max(worst, check.error(rng));
    const bool ok = worst < check.tolerance;
    failures += ok ? 0 : 1;
    out << (ok ? "PASS " : "FAIL ") << check.name << "  (worst " << worst << " over " << trials
        << " trials)\n";
  }
  return failures;
}

}  // namespace freqneuro::cli
