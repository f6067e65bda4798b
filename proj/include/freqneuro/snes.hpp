#ifndef FREQNEURO_SNES_HPP_
#define FREQNEURO_SNES_HPP_

#include <cstddef>
#include <cstdint>
#include <random>
#include <span>
#include <vector>

namespace freqneuro {

enum class LogBase { kNatural, kTen };
enum class Objective { kMaximize, kMinimize };

// lambda = 4 + floor(3 log C) + 4
std::size_t population_size(std::size_t dimensions, LogBase base = LogBase::kNatural);

struct LearningRates {
  double mean = 0.0;
  double sigma = 0.0;
};

// eta_mu = eta_sigma = (log d + 3) / (5 sqrt d)
LearningRates learning_rates(std::size_t dimensions, LogBase base = LogBase::kNatural);

// Rank-based fitness shaping: u_j = max(0, ln(lambda/2 + 1) - ln j),
// normalized to sum 1 and shifted by -1/lambda. u[0] belongs to the best.
std::vector<double> rank_utilities(std::size_t population);

struct SnesOptions {
  double initial_sigma = 1.0;
  LogBase log_base = LogBase::kNatural;
};

// Separable Gaussian search distribution. The generator is part of the
// state, so copying a distribution forks an identical trajectory.
struct SearchDistribution {
  std::vector<double> mean;
  std::vector<double> sigma;
  double eta_mean = 0.0;
  double eta_sigma = 0.0;
  std::size_t population = 0;
  std::uint64_t seed = 0;
  LogBase log_base = LogBase::kNatural;
  std::mt19937_64 rng;

  std::size_t dimensions() const { return mean.size(); }
};

// mean = 0, sigma = options.initial_sigma, population and learning rates
// from the formulas above.
SearchDistribution make_distribution(std::size_t dimensions, std::uint64_t seed,
                                     const SnesOptions& options = {});

struct Population {
  std::vector<std::vector<double>> candidates;  // mean + sigma * z
  std::vector<std::vector<double>> noise;       // z ~ N(0, I)
};

Population ask(SearchDistribution& dist);

void tell(SearchDistribution& dist, const Population& population,
          std::span<const double> fitness, Objective objective = Objective::kMaximize);

// Grows the distribution to a new chromosome layout (see regroup). New
// dimensions start at mean 0 and the given sigma; population size and
// learning rates are recomputed for the new dimension.
void extend(SearchDistribution& dist, std::span<const std::size_t> old_lengths,
            std::span<const std::size_t> new_lengths, double initial_sigma);

}  // namespace freqneuro

#endif  // FREQNEURO_SNES_HPP_
