#include "freqneuro/harness.hpp"

#include <algorithm>
#include <atomic>
#include <chrono>
#include <cmath>
#include <cstring>
#include <exception>
#include <mutex>
#include <stdexcept>
#include <string>
#include <thread>

namespace freqneuro {

std::string_view to_string(EncodingKind kind) {
  switch (kind) {
    case EncodingKind::kPsi1: return "psi1";
    case EncodingKind::kPsi2: return "psi2";
    case EncodingKind::kPsi3: return "psi3";
    case EncodingKind::kDirect: return "direct";
  }
  return "direct";
}

EncodingKind parse_encoding(std::string_view text) {
  if (text == "psi1") return EncodingKind::kPsi1;
  if (text == "psi2") return EncodingKind::kPsi2;
  if (text == "psi3") return EncodingKind::kPsi3;
  if (text == "direct") return EncodingKind::kDirect;
  throw std::invalid_argument("unknown encoding '" + std::string(text) + "'");
}

namespace {

SchemeName scheme_name(const ExperimentConfig& config) {
  switch (config.encoding) {
    case EncodingKind::kPsi1: return SchemeName::kPsi1;
    case EncodingKind::kPsi2: return SchemeName::kPsi2;
    case EncodingKind::kPsi3: return SchemeName::kPsi3;
    case EncodingKind::kDirect: break;
  }
  return config.arch == ArchitectureKind::kTheta1 ? SchemeName::kPsi1 : SchemeName::kPsi3;
}

}  // namespace

MappingScheme scheme_for(const ExperimentConfig& config, std::size_t compartments) {
  return build_scheme(scheme_name(config), config.arch, compartments);
}

void validate_config(const ExperimentConfig& config) {
  if (config.arch == ArchitectureKind::kCustom) {
    throw std::invalid_argument("experiments need theta1 or theta2");
  }
  if (config.compartments < 1) throw std::invalid_argument("compartment count must be >= 1");
  if (config.runs < 1) throw std::invalid_argument("at least one run required");
  if (config.eval_budget < 1) throw std::invalid_argument("evaluation budget must be positive");
  const auto scheme = scheme_for(config, config.compartments);  // checks the pairing
  if (config.encoding != EncodingKind::kDirect) {
    if (config.coefficients < 1) throw std::invalid_argument("coefficient count must be >= 1");
    if (config.coefficients > scheme.total_capacity()) {
      throw std::invalid_argument("coefficient count exceeds the scheme's capacity");
    }
  }
}

std::size_t search_dimension(const ExperimentConfig& config) {
  if (config.encoding == EncodingKind::kDirect) {
    return make_architecture(config.arch, config.compartments).weight_count();
  }
  return config.coefficients;
}

std::vector<std::size_t> initial_layout(const ExperimentConfig& config) {
  if (config.encoding == EncodingKind::kDirect) return {search_dimension(config)};
  return distribute_coefficients(config.coefficients,
                                 scheme_for(config, config.compartments).capacities());
}

NetworkWeights network_of(const ExperimentConfig& config, const Genome& genome,
                          std::size_t compartments) {
  if (config.encoding == EncodingKind::kDirect) {
    const auto arch = make_architecture(config.arch, config.compartments);
    auto weights = NetworkWeights::from_flat(arch, genome.coefficients);
    if (compartments == config.compartments) return weights;
    const auto scheme = scheme_for(config, config.compartments);
    return resize(encode(weights, scheme), scheme, compartments);
  }
  const auto scheme = scheme_for(config, config.compartments);
  if (compartments == config.compartments) return decode(genome, scheme);
  return resize(genome, scheme, compartments);
}

FitnessFunction arm_fitness(const ExperimentConfig& config) {
  const auto arch = make_architecture(config.arch, config.compartments);
  const auto trials = training_trials(config.compartments, config.physics);
  if (config.encoding == EncodingKind::kDirect) {
    return [config, arch, trials](const Genome& genome) {
      const auto weights = NetworkWeights::from_flat(arch, genome.coefficients);
      return evaluate(weights, arch.mode, config.compartments, trials, config.physics);
    };
  }
  const auto scheme = scheme_for(config, config.compartments);
  return [config, arch, trials, scheme](const Genome& genome) {
    return evaluate(decode(genome, scheme), arch.mode, config.compartments, trials,
                    config.physics);
  };
}

std::uint64_t weights_checksum(const NetworkWeights& weights) {
  std::uint64_t hash = 0xcbf29ce484222325ULL;
  for (double w : weights.flatten()) {
    unsigned char bytes[sizeof(double)];
    std::memcpy(bytes, &w, sizeof(double));
    for (unsigned char b : bytes) {
      hash ^= b;
      hash *= 0x100000001b3ULL;
    }
  }
  return hash;
}

std::uint64_t run_seed(const ExperimentConfig& config, std::size_t run_index) {
  return config.base_seed + run_index;
}

namespace {

std::vector<double> evaluate_population(const Population& population,
                                        std::span<const std::size_t> layout,
                                        const FitnessFunction& fitness, std::size_t workers) {
  const std::size_t lambda = population.candidates.size();
  std::vector<double> scores(lambda);
  auto evaluate_one = [&](std::size_t j) {
    Genome genome{population.candidates[j], {layout.begin(), layout.end()}};
    scores[j] = fitness(genome);
  };
  const std::size_t threads = std::min(std::max<std::size_t>(workers, 1), lambda);
  if (threads <= 1) {
    for (std::size_t j = 0; j < lambda; ++j) evaluate_one(j);
    return scores;
  }
  std::atomic<std::size_t> next{0};
  std::exception_ptr failure;
  std::mutex failure_mutex;
  std::vector<std::thread> pool;
  for (std::size_t w = 0; w < threads; ++w) {
    pool.emplace_back([&] {
      for (std::size_t j = next++; j < lambda; j = next++) {
        try {
          evaluate_one(j);
        } catch (...) {
          std::lock_guard lock(failure_mutex);
          if (!failure) failure = std::current_exception();
        }
      }
    });
  }
  for (auto& t : pool) t.join();
  if (failure) std::rethrow_exception(failure);
  return scores;
}

// Runs generations until the run has spent `stage_end` evaluations in total.
void evolve_stage(SearchDistribution& dist, std::span<const std::size_t> layout,
                  const FitnessFunction& fitness, std::size_t stage_end,
                  std::size_t workers, RunRecord& record) {
  while (record.evaluations < stage_end) {
    const Population population = ask(dist);
    const auto scores = evaluate_population(population, layout, fitness, workers);
    record.evaluations += scores.size();

    const auto best = std::max_element(scores.begin(), scores.end());
    const std::size_t best_index = static_cast<std::size_t>(best - scores.begin());
    if (record.generations.empty() || *best > record.best_fitness) {
      record.best_fitness = *best;
      record.best_genome = Genome{population.candidates[best_index], {layout.begin(), layout.end()}};
      record.best_coefficients = dist.dimensions();
    }
    record.generations.push_back({record.generations.size(), record.evaluations,
                                  dist.dimensions(), *best, record.best_fitness});
    tell(dist, population, scores, Objective::kMaximize);
  }
}

void finish_record(RunRecord& record, const ExperimentConfig& config,
                   std::chrono::steady_clock::time_point start, bool arm_task) {
  if (arm_task && !record.best_genome.coefficients.empty()) {
    record.weights_checksum =
        weights_checksum(network_of(config, record.best_genome, config.compartments));
  }
  record.wall_seconds =
      std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
}

RunRecord evolution_impl(const ExperimentConfig& config, std::size_t run_index,
                         const FitnessFunction& fitness, bool arm_task) {
  validate_config(config);
  const auto start = std::chrono::steady_clock::now();
  RunRecord record;
  record.config = config;
  record.run_index = run_index;
  record.seed = run_seed(config, run_index);
  const auto layout = initial_layout(config);
  SearchDistribution dist = make_distribution(search_dimension(config), record.seed, config.snes);
  try {
    evolve_stage(dist, layout, fitness, config.eval_budget, config.workers, record);
  } catch (const std::exception& e) {
    finish_record(record, config, start, false);
    throw RunError(e.what(), std::move(record));
  }
  finish_record(record, config, start, arm_task);
  return record;
}

RunRecord incremental_impl(const ExperimentConfig& config, std::size_t run_index,
                           const FitnessFunction& fitness, bool arm_task) {
  if (config.encoding == EncodingKind::kDirect) {
    throw std::invalid_argument("incremental search needs an indirect encoding");
  }
  ExperimentConfig staged = config;
  staged.coefficients = config.incremental.start_coefficients;
  validate_config(staged);
  const auto start = std::chrono::steady_clock::now();
  const auto scheme = scheme_for(staged, staged.compartments);
  const auto& inc = config.incremental;

  RunRecord record;
  record.config = config;
  record.run_index = run_index;
  record.seed = run_seed(config, run_index);
  std::vector<std::size_t> layout = initial_layout(staged);
  SearchDistribution dist = make_distribution(staged.coefficients, record.seed, config.snes);

  try {
    std::size_t stage = 1;
    evolve_stage(dist, layout, fitness, inc.stage_evaluations, config.workers, record);
    std::size_t stagnant = 0;
    while (stagnant < inc.stagnation_stages) {
      std::vector<std::size_t> grown;
      try {
        grown = grow_lengths(layout, scheme.capacities(), inc.step);
      } catch (const std::invalid_argument&) {
        break;  // every chromosome is full
      }
      extend(dist, layout, grown, config.snes.initial_sigma);
      layout = std::move(grown);
      const double before = record.best_fitness;
      ++stage;
      evolve_stage(dist, layout, fitness, stage * inc.stage_evaluations, config.workers, record);
      if (record.best_fitness - before < inc.improvement_epsilon) {
        ++stagnant;
      } else {
        stagnant = 0;
      }
    }
  } catch (const std::exception& e) {
    finish_record(record, config, start, false);
    throw RunError(e.what(), std::move(record));
  }
  finish_record(record, config, start, arm_task);
  return record;
}

}  // namespace

RunRecord run_evolution(const ExperimentConfig& config, std::size_t run_index,
                        const FitnessFunction& fitness) {
  return evolution_impl(config, run_index, fitness, false);
}

RunRecord run_evolution(const ExperimentConfig& config, std::size_t run_index) {
  return evolution_impl(config, run_index, arm_fitness(config), true);
}

RunRecord run_incremental(const ExperimentConfig& config, std::size_t run_index,
                          const FitnessFunction& fitness) {
  return incremental_impl(config, run_index, fitness, false);
}

RunRecord run_incremental(const ExperimentConfig& config, std::size_t run_index) {
  // The fitness decodes whatever layout it is handed, so one closure serves
  // every stage.
  const auto scheme = scheme_for(config, config.compartments);
  const auto arch = make_architecture(config.arch, config.compartments);
  const auto trials = training_trials(config.compartments, config.physics);
  FitnessFunction fitness = [config, scheme, arch, trials](const Genome& genome) {
    return evaluate(decode(genome, scheme), arch.mode, config.compartments, trials,
                    config.physics);
  };
  return incremental_impl(config, run_index, fitness, true);
}

double median(std::span<const double> values) { return summarize(values).median; }

Summary summarize(std::span<const double> values) {
  if (values.empty()) throw std::invalid_argument("cannot summarize an empty sample");
  std::vector<double> sorted(values.begin(), values.end());
  std::sort(sorted.begin(), sorted.end());
  auto quantile = [&](double q) {
    const double pos = q * static_cast<double>(sorted.size() - 1);
    const auto lo = static_cast<std::size_t>(std::floor(pos));
    const auto hi = static_cast<std::size_t>(std::ceil(pos));
    return sorted[lo] + (pos - static_cast<double>(lo)) * (sorted[hi] - sorted[lo]);
  };
  return {quantile(0.5), quantile(0.25), quantile(0.75), sorted.front(), sorted.back()};
}

PositionScores test_generalization_positions(std::span<const Genome> best_genomes,
                                             const ExperimentConfig& config) {
  const auto arch = make_architecture(config.arch, config.compartments);
  const auto trials = generalization_trials(config.compartments, config.physics);
  PositionScores out;
  for (const auto& genome : best_genomes) {
    const auto weights = network_of(config, genome, config.compartments);
    std::vector<double> per_angle;
    for (const auto& trial : trials) {
      per_angle.push_back(
          run_trial(weights, arch.mode, config.compartments, trial, config.physics).score);
    }
    double mean = 0.0;
    for (double s : per_angle) mean += s;
    out.scores.push_back(mean / static_cast<double>(per_angle.size()));
    out.per_angle.push_back(std::move(per_angle));
  }
  if (!out.scores.empty()) out.summary = summarize(out.scores);
  return out;
}

LengthScores evaluate_lengths(std::span<const Genome> best_genomes, const ExperimentConfig& config,
                              std::span<const std::size_t> compartment_range) {
  LengthScores out;
  for (std::size_t p : compartment_range) {
    const auto arch = make_architecture(config.arch, p);
    const auto trials = training_trials(p, config.physics);
    std::vector<double> scores;
    for (const auto& genome : best_genomes) {
      const auto weights = network_of(config, genome, p);
      scores.push_back(evaluate(weights, arch.mode, p, trials, config.physics,
                                DistanceMode::kClosest));
    }
    out.compartments.push_back(p);
    out.medians.push_back(scores.empty() ? 0.0 : median(scores));
    out.scores.push_back(std::move(scores));
  }
  return out;
}

std::vector<SurfaceCell> test_generalization_lengths(std::span<const Genome> indirect_genomes,
                                                     const ExperimentConfig& indirect_config,
                                                     std::span<const Genome> direct_genomes,
                                                     const ExperimentConfig& direct_config,
                                                     std::span<const std::size_t> compartment_range) {
  const auto indirect = evaluate_lengths(indirect_genomes, indirect_config, compartment_range);
  const auto direct = evaluate_lengths(direct_genomes, direct_config, compartment_range);
  std::vector<SurfaceCell> surface;
  for (std::size_t j = 0; j < compartment_range.size(); ++j) {
    SurfaceCell cell;
    cell.coefficients = indirect_config.coefficients;
    cell.compartments = compartment_range[j];
    cell.indirect_median = indirect.medians[j];
    cell.direct_median = direct.medians[j];
    cell.difference = cell.indirect_median - cell.direct_median;
    surface.push_back(cell);
  }
  return surface;
}

}  // namespace freqneuro
