#ifndef FREQNEURO_HARNESS_HPP_
#define FREQNEURO_HARNESS_HPP_

#include <cstddef>
#include <cstdint>
#include <functional>
#include <optional>
#include <span>
#include <stdexcept>
#include <string>
#include <utility>
#include <vector>

#include "freqneuro/arm_sim.hpp"
#include "freqneuro/encoding.hpp"
#include "freqneuro/snes.hpp"

namespace freqneuro {

enum class EncodingKind { kPsi1, kPsi2, kPsi3, kDirect };

std::string_view to_string(EncodingKind kind);
EncodingKind parse_encoding(std::string_view text);

struct IncrementalConfig {
  std::size_t start_coefficients = 10;
  std::size_t step = 10;
  std::size_t stage_evaluations = 6000;
  std::size_t stagnation_stages = 6;
  double improvement_epsilon = 1e-4;
};

struct ExperimentConfig {
  ArchitectureKind arch = ArchitectureKind::kTheta1;
  EncodingKind encoding = EncodingKind::kPsi1;
  std::size_t coefficients = 20;  // ignored for direct encoding
  std::size_t compartments = 10;
  std::size_t eval_budget = 6000;
  std::size_t runs = 5;
  std::uint64_t base_seed = 1;
  std::size_t workers = 1;
  SnesOptions snes;
  PhysicsConfig physics;
  IncrementalConfig incremental;
};

// Throws on invalid combinations (psi2 needs theta1, psi3 needs theta2,
// coefficient count in [1, scheme capacity]).
void validate_config(const ExperimentConfig& config);

// Scheme for indirect encodings. For direct encodings this is the scheme
// used to move networks through the frequency domain: psi1 for theta1 and
// psi3 for theta2.
MappingScheme scheme_for(const ExperimentConfig& config, std::size_t compartments);

// Search-space dimension: C for indirect encodings, the weight count for
// direct ones.
std::size_t search_dimension(const ExperimentConfig& config);

// Genome layout of a fresh run (a single chromosome for direct encoding).
std::vector<std::size_t> initial_layout(const ExperimentConfig& config);

NetworkWeights network_of(const ExperimentConfig& config, const Genome& genome,
                          std::size_t compartments);

using FitnessFunction = std::function<double(const Genome&)>;

// Mean score of the decoded network over the three training trials.
FitnessFunction arm_fitness(const ExperimentConfig& config);

struct GenerationRecord {
  std::size_t generation = 0;
  std::size_t evaluations = 0;  // cumulative
  std::size_t coefficients = 0;
  double generation_best = 0.0;
  double best_so_far = 0.0;
};

struct RunRecord {
  ExperimentConfig config;
  std::size_t run_index = 0;
  std::uint64_t seed = 0;
  std::vector<GenerationRecord> generations;
  std::size_t evaluations = 0;
  double best_fitness = 0.0;
  Genome best_genome;
  std::size_t best_coefficients = 0;  // genome size that produced the best
  std::uint64_t weights_checksum = 0;
  double wall_seconds = 0.0;
};

// Thrown when a run fails part way; carries everything recorded so far.
class RunError : public std::runtime_error {
 public:
  RunError(const std::string& what, RunRecord partial)
      : std::runtime_error(what), partial_(std::move(partial)) {}
  const RunRecord& partial() const { return partial_; }

 private:
  RunRecord partial_;
};

// FNV-1a over the bytes of the flattened weights.
std::uint64_t weights_checksum(const NetworkWeights& weights);

// Seed for run k: base_seed + k.
std::uint64_t run_seed(const ExperimentConfig& config, std::size_t run_index);

// ask -> evaluate (config.workers threads) -> tell until the budget is
// spent. The last generation may overshoot the budget by at most
// lambda - 1 evaluations.
RunRecord run_evolution(const ExperimentConfig& config, std::size_t run_index,
                        const FitnessFunction& fitness);
RunRecord run_evolution(const ExperimentConfig& config, std::size_t run_index);

// Starts at incremental.start_coefficients and adds incremental.step
// coefficients (new dimensions: mean 0, initial sigma) after every stage of
// incremental.stage_evaluations evaluations. Stage k ends once the run has
// used k * stage_evaluations evaluations in total. Stops once
// incremental.stagnation_stages consecutive additions fail to raise the
// best fitness by improvement_epsilon, or the scheme is full.
RunRecord run_incremental(const ExperimentConfig& config, std::size_t run_index,
                          const FitnessFunction& fitness);
RunRecord run_incremental(const ExperimentConfig& config, std::size_t run_index);

struct Summary {
  double median = 0.0;
  double lower_quartile = 0.0;
  double upper_quartile = 0.0;
  double min = 0.0;
  double max = 0.0;
};

// Quartiles interpolate linearly between order statistics.
Summary summarize(std::span<const double> values);
double median(std::span<const double> values);

struct PositionScores {
  std::vector<std::vector<double>> per_angle;  // [run][held-out angle]
  std::vector<double> scores;                  // per run, mean over angles
  Summary summary;
};

PositionScores test_generalization_positions(std::span<const Genome> best_genomes,
                                             const ExperimentConfig& config);

struct LengthScores {
  std::vector<std::size_t> compartments;
  std::vector<std::vector<double>> scores;  // [compartment index][run]
  std::vector<double> medians;
};

// Each genome is turned into a network at every compartment count: indirect
// genomes through resize, direct networks by a full-rank encode at the
// training length followed by resize. Trials use T(p) and closest-approach
// scoring.
LengthScores evaluate_lengths(std::span<const Genome> best_genomes, const ExperimentConfig& config,
                              std::span<const std::size_t> compartment_range);

struct SurfaceCell {
  std::size_t coefficients = 0;
  std::size_t compartments = 0;
  double indirect_median = 0.0;
  double direct_median = 0.0;
  double difference = 0.0;  // indirect - direct
};

std::vector<SurfaceCell> test_generalization_lengths(std::span<const Genome> indirect_genomes,
                                                     const ExperimentConfig& indirect_config,
                                                     std::span<const Genome> direct_genomes,
                                                     const ExperimentConfig& direct_config,
                                                     std::span<const std::size_t> compartment_range);

}  // namespace freqneuro

#endif  // FREQNEURO_HARNESS_HPP_
