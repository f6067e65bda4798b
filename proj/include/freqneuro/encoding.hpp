#ifndef FREQNEURO_ENCODING_HPP_
#define FREQNEURO_ENCODING_HPP_

#include <cstddef>
#include <cstdint>
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "freqneuro/dct.hpp"

namespace freqneuro {

// Observation layout shared with the arm simulator: compartment c owns
// inputs [8c, 8c+8), the base angle and angular velocity are inputs 8p and
// 8p+1. Raw actions: compartment c owns [3c, 3c+3) as (dorsal, transverse,
// ventral); 3p and 3p+1 rotate the base counter-clockwise / clockwise.
inline constexpr std::size_t kStateVarsPerCompartment = 8;
inline constexpr std::size_t kMusclesPerCompartment = 3;
inline constexpr std::size_t kBaseInputs = 2;
inline constexpr std::size_t kRotationActions = 2;
inline constexpr std::size_t kMetaActions = 8;

std::size_t observation_size(std::size_t compartments);
std::size_t raw_action_size(std::size_t compartments);

enum class ActionMode { kMeta, kRaw };
enum class ArchitectureKind { kTheta1, kTheta2, kCustom };

struct NetworkArchitecture {
  ArchitectureKind kind = ArchitectureKind::kCustom;
  std::size_t neurons = 0;
  std::size_t inputs = 0;
  ActionMode mode = ActionMode::kMeta;

  std::size_t weight_count() const { return neurons * inputs + neurons * neurons + neurons; }
  bool operator==(const NetworkArchitecture&) const = default;
};

// Theta1: 8 neurons driving the meta-actions. Theta2: one neuron per raw
// action (3p+2, i.e. a 3 x (p+1) grid minus one slot).
NetworkArchitecture make_architecture(ArchitectureKind kind, std::size_t compartments);

struct Matrix {
  std::size_t rows = 0;
  std::size_t cols = 0;
  std::vector<double> values;  // row-major

  Matrix() = default;
  Matrix(std::size_t r, std::size_t c) : rows(r), cols(c), values(r * c, 0.0) {}
  double& operator()(std::size_t r, std::size_t c) { return values[r * cols + c]; }
  double operator()(std::size_t r, std::size_t c) const { return values[r * cols + c]; }
  bool operator==(const Matrix&) const = default;
};

struct NetworkWeights {
  Matrix input;      // neurons x inputs
  Matrix recurrent;  // neurons x neurons, row = target neuron
  std::vector<double> bias;

  static NetworkWeights zeros(const NetworkArchitecture& arch);
  // Flat layout: input (row-major), recurrent (row-major), bias. This is
  // also the parameter vector of directly encoded networks.
  static NetworkWeights from_flat(const NetworkArchitecture& arch,
                                  std::span<const double> flat);
  std::vector<double> flatten() const;
  std::size_t neurons() const { return bias.size(); }
  std::size_t inputs() const { return input.cols; }
  bool operator==(const NetworkWeights&) const = default;
};

enum class WeightBlock : std::uint8_t { kInput, kRecurrent, kBias };

struct WeightSlot {
  WeightBlock block = WeightBlock::kInput;
  std::uint32_t row = 0;
  std::uint32_t col = 0;
  bool operator==(const WeightSlot&) const = default;
};

// One coefficient array and where each of its cells lands after decoding.
struct ArrayLayout {
  std::vector<std::size_t> dims;
  std::vector<std::optional<WeightSlot>> placement;  // per row-major cell

  std::size_t capacity() const { return placement.size(); }
  std::size_t placed_count() const;
};

enum class SchemeName { kPsi1, kPsi2, kPsi3, kCustom };

std::string_view to_string(SchemeName name);
std::string_view to_string(ArchitectureKind kind);
SchemeName parse_scheme_name(std::string_view text);
ArchitectureKind parse_architecture(std::string_view text);

struct MappingScheme {
  SchemeName name = SchemeName::kCustom;
  std::size_t compartments = 0;
  NetworkArchitecture arch;
  std::vector<ArrayLayout> arrays;  // one per chromosome

  std::size_t chromosome_count() const { return arrays.size(); }
  std::vector<std::size_t> capacities() const;
  std::size_t total_capacity() const;
};

// Throws unless every weight slot of scheme.arch is covered by exactly one
// placed cell.
void validate_scheme(const MappingScheme& scheme);

// Psi1: one neurons x (inputs + neurons + 1) matrix holding the
// [input | recurrent | bias] column blocks. Works for any architecture.
MappingScheme single_matrix_scheme(const NetworkArchitecture& arch);

// Psi1 for either architecture, Psi2 for Theta1, Psi3 for Theta2.
MappingScheme build_scheme(SchemeName name, ArchitectureKind kind, std::size_t compartments);

struct Genome {
  std::vector<double> coefficients;
  std::vector<std::size_t> chromosome_lengths;

  std::size_t size() const { return coefficients.size(); }
  bool operator==(const Genome&) const = default;
};

// Throws if the lengths do not sum to the coefficient count.
void validate_genome(const Genome& genome);
// Additionally checks chromosome count and per-array capacity.
void validate_genome(const Genome& genome, const MappingScheme& scheme);

// Chromosome lengths after appending `count` coefficients one at a time,
// cycling over chromosomes from the first shortest one that still has
// room. Chromosomes at capacity are skipped; growth stops early once all
// are full. Throws "genome at maximum capacity" if nothing can be added.
std::vector<std::size_t> grow_lengths(std::span<const std::size_t> lengths,
                                      std::span<const std::size_t> capacities,
                                      std::size_t count);

// Even split of `total` coefficients, e.g. 10 over three chromosomes gives
// (4, 3, 3).
std::vector<std::size_t> distribute_coefficients(std::size_t total,
                                                 std::span<const std::size_t> capacities);

// Zero genome with an even split of `total` coefficients over the scheme.
Genome make_genome(const MappingScheme& scheme, std::size_t total);

// Moves a flat per-coefficient vector from one chromosome layout to a
// longer one, chromosome by chromosome; new positions get `fill`.
std::vector<double> regroup(std::span<const double> values,
                            std::span<const std::size_t> old_lengths,
                            std::span<const std::size_t> new_lengths, double fill);

std::vector<std::vector<double>> split_genome(const Genome& genome,
                                              const MappingScheme& scheme);

// Coefficient arrays of each chromosome, before the inverse transform.
std::vector<RealArray> coefficient_arrays(const Genome& genome, const MappingScheme& scheme);

NetworkWeights decode(const Genome& genome, const MappingScheme& scheme);

// Places the weights in the scheme's arrays (unused cells 0), applies the
// forward transform and reads each array along its importance order. With
// no total, every cell is kept and decode(encode(w)) == w.
Genome encode(const NetworkWeights& weights, const MappingScheme& scheme,
              std::optional<std::size_t> total = std::nullopt);

// Rebuilds the scheme for another compartment count and decodes the same
// coefficients into it. Coefficient cells keep their array coordinates:
// growing an axis pads with zeros, shrinking it drops the cells that no
// longer fit.
NetworkWeights resize(const Genome& genome, const MappingScheme& scheme,
                      std::size_t new_compartments);

Genome add_coefficients(const Genome& genome, const MappingScheme& scheme, std::size_t count);

double compression_ratio(std::size_t weights, std::size_t coefficients);

}  // namespace freqneuro

#endif  // FREQNEURO_ENCODING_HPP_
