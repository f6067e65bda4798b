#include "freqneuro/snes.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <stdexcept>

#include "freqneuro/encoding.hpp"

namespace freqneuro {

namespace {

double log_of(double x, LogBase base) {
  return base == LogBase::kNatural ? std::log(x) : std::log10(x);
}

}  // namespace

std::size_t population_size(std::size_t dimensions, LogBase base) {
  if (dimensions < 1) throw std::invalid_argument("dimension count must be >= 1");
  return 4 + static_cast<std::size_t>(std::floor(3.0 * log_of(static_cast<double>(dimensions), base))) + 4;
}

LearningRates learning_rates(std::size_t dimensions, LogBase base) {
  if (dimensions < 1) throw std::invalid_argument("dimension count must be >= 1");
  const double d = static_cast<double>(dimensions);
  const double eta = (log_of(d, base) + 3.0) / (5.0 * std::sqrt(d));
  return {eta, eta};
}

std::vector<double> rank_utilities(std::size_t population) {
  if (population < 1) throw std::invalid_argument("population must be positive");
  const double lambda = static_cast<double>(population);
  std::vector<double> u(population);
  for (std::size_t j = 0; j < population; ++j) {
    u[j] = std::max(0.0, std::log(lambda / 2.0 + 1.0) - std::log(static_cast<double>(j + 1)));
  }
  const double total = std::accumulate(u.begin(), u.end(), 0.0);
  for (double& v : u) v = v / total - 1.0 / lambda;
  return u;
}

SearchDistribution make_distribution(std::size_t dimensions, std::uint64_t seed,
                                     const SnesOptions& options) {
  if (!(options.initial_sigma > 0.0)) throw std::invalid_argument("initial sigma must be positive");
  SearchDistribution dist;
  dist.mean.assign(dimensions, 0.0);
  dist.sigma.assign(dimensions, options.initial_sigma);
  const auto rates = learning_rates(dimensions, options.log_base);
  dist.eta_mean = rates.mean;
  dist.eta_sigma = rates.sigma;
  dist.population = population_size(dimensions, options.log_base);
  dist.seed = seed;
  dist.log_base = options.log_base;
  dist.rng.seed(seed);
  return dist;
}

Population ask(SearchDistribution& dist) {
  const std::size_t d = dist.dimensions();
  std::normal_distribution<double> normal(0.0, 1.0);
  Population pop;
  pop.candidates.resize(dist.population);
  pop.noise.resize(dist.population);
  for (std::size_t j = 0; j < dist.population; ++j) {
    auto& z = pop.noise[j];
    auto& x = pop.candidates[j];
    z.resize(d);
    x.resize(d);
    for (std::size_t i = 0; i < d; ++i) {
      z[i] = normal(dist.rng);
      x[i] = dist.mean[i] + dist.sigma[i] * z[i];
    }
  }
  return pop;
}

void tell(SearchDistribution& dist, const Population& population,
          std::span<const double> fitness, Objective objective) {
  const std::size_t lambda = population.noise.size();
  if (fitness.size() != lambda) throw std::invalid_argument("one fitness per candidate required");
  for (double f : fitness) {
    if (!std::isfinite(f)) throw std::invalid_argument("non-finite fitness");
  }

  // Best first; equal fitness values share the mean of their utilities.
  std::vector<std::size_t> order(lambda);
  std::iota(order.begin(), order.end(), std::size_t{0});
  auto better = [&](std::size_t a, std::size_t b) {
    return objective == Objective::kMaximize ? fitness[a] > fitness[b] : fitness[a] < fitness[b];
  };
  std::stable_sort(order.begin(), order.end(), better);
  const auto base = rank_utilities(lambda);
  std::vector<double> utility(lambda);
  for (std::size_t start = 0; start < lambda;) {
    std::size_t end = start + 1;
    while (end < lambda && fitness[order[end]] == fitness[order[start]]) ++end;
    // A single tie group spanning the population carries no ranking.
    const double shared =
        end - start == lambda
            ? 0.0
            : std::accumulate(base.begin() + static_cast<std::ptrdiff_t>(start),
                              base.begin() + static_cast<std::ptrdiff_t>(end), 0.0) /
                  static_cast<double>(end - start);
    for (std::size_t r = start; r < end; ++r) utility[order[r]] = shared;
    start = end;
  }

  const std::size_t d = dist.dimensions();
  for (std::size_t i = 0; i < d; ++i) {
    double grad_mean = 0.0;
    double grad_sigma = 0.0;
    for (std::size_t j = 0; j < lambda; ++j) {
      const double z = population.noise[j][i];
      grad_mean += utility[j] * z;
      grad_sigma += utility[j] * (z * z - 1.0);
    }
    dist.mean[i] += dist.eta_mean * dist.sigma[i] * grad_mean;
    dist.sigma[i] *= std::exp(0.5 * dist.eta_sigma * grad_sigma);
  }
}

void extend(SearchDistribution& dist, std::span<const std::size_t> old_lengths,
            std::span<const std::size_t> new_lengths, double initial_sigma) {
  dist.mean = regroup(dist.mean, old_lengths, new_lengths, 0.0);
  dist.sigma = regroup(dist.sigma, old_lengths, new_lengths, initial_sigma);
  const auto rates = learning_rates(dist.dimensions(), dist.log_base);
  dist.eta_mean = rates.mean;
  dist.eta_sigma = rates.sigma;
  dist.population = population_size(dist.dimensions(), dist.log_base);
}

}  // namespace freqneuro
