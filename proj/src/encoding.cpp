#include "freqneuro/encoding.hpp"

#include <algorithm>
#include <numeric>
#include <stdexcept>
#include <string>

#include "freqneuro/ordering.hpp"

namespace freqneuro {

std::size_t observation_size(std::size_t compartments) {
  return kStateVarsPerCompartment * compartments + kBaseInputs;
}

std::size_t raw_action_size(std::size_t compartments) {
  return kMusclesPerCompartment * compartments + kRotationActions;
}

NetworkArchitecture make_architecture(ArchitectureKind kind, std::size_t compartments) {
  if (compartments < 1) throw std::invalid_argument("compartment count must be >= 1");
  switch (kind) {
    case ArchitectureKind::kTheta1:
      return {kind, kMetaActions, observation_size(compartments), ActionMode::kMeta};
    case ArchitectureKind::kTheta2:
      return {kind, raw_action_size(compartments), observation_size(compartments),
              ActionMode::kRaw};
    case ArchitectureKind::kCustom:
      break;
  }
  throw std::invalid_argument("custom architectures have no compartment formula");
}

NetworkWeights NetworkWeights::zeros(const NetworkArchitecture& arch) {
  NetworkWeights w;
  w.input = Matrix(arch.neurons, arch.inputs);
  w.recurrent = Matrix(arch.neurons, arch.neurons);
  w.bias.assign(arch.neurons, 0.0);
  return w;
}

NetworkWeights NetworkWeights::from_flat(const NetworkArchitecture& arch,
                                         std::span<const double> flat) {
  if (flat.size() != arch.weight_count()) {
    throw std::invalid_argument("flat weight vector has length " +
                                std::to_string(flat.size()) + ", expected " +
                                std::to_string(arch.weight_count()));
  }
  NetworkWeights w = zeros(arch);
  std::copy_n(flat.begin(), w.input.values.size(), w.input.values.begin());
  std::size_t offset = w.input.values.size();
  std::copy_n(flat.begin() + static_cast<std::ptrdiff_t>(offset), w.recurrent.values.size(),
              w.recurrent.values.begin());
  offset += w.recurrent.values.size();
  std::copy_n(flat.begin() + static_cast<std::ptrdiff_t>(offset), w.bias.size(),
              w.bias.begin());
  return w;
}

std::vector<double> NetworkWeights::flatten() const {
  std::vector<double> flat;
  flat.reserve(input.values.size() + recurrent.values.size() + bias.size());
  flat.insert(flat.end(), input.values.begin(), input.values.end());
  flat.insert(flat.end(), recurrent.values.begin(), recurrent.values.end());
  flat.insert(flat.end(), bias.begin(), bias.end());
  return flat;
}

std::size_t ArrayLayout::placed_count() const {
  return static_cast<std::size_t>(
      std::count_if(placement.begin(), placement.end(), [](const auto& s) { return s.has_value(); }));
}

std::string_view to_string(SchemeName name) {
  switch (name) {
    case SchemeName::kPsi1: return "psi1";
    case SchemeName::kPsi2: return "psi2";
    case SchemeName::kPsi3: return "psi3";
    case SchemeName::kCustom: return "custom";
  }
  return "custom";
}

std::string_view to_string(ArchitectureKind kind) {
  switch (kind) {
    case ArchitectureKind::kTheta1: return "theta1";
    case ArchitectureKind::kTheta2: return "theta2";
    case ArchitectureKind::kCustom: return "custom";
  }
  return "custom";
}

SchemeName parse_scheme_name(std::string_view text) {
  if (text == "psi1") return SchemeName::kPsi1;
  if (text == "psi2") return SchemeName::kPsi2;
  if (text == "psi3") return SchemeName::kPsi3;
  if (text == "custom") return SchemeName::kCustom;
  throw std::invalid_argument("unknown mapping scheme '" + std::string(text) + "'");
}

ArchitectureKind parse_architecture(std::string_view text) {
  if (text == "theta1") return ArchitectureKind::kTheta1;
  if (text == "theta2") return ArchitectureKind::kTheta2;
  if (text == "custom") return ArchitectureKind::kCustom;
  throw std::invalid_argument("unknown architecture '" + std::string(text) + "'");
}

std::vector<std::size_t> MappingScheme::capacities() const {
  std::vector<std::size_t> caps;
  caps.reserve(arrays.size());
  for (const auto& a : arrays) caps.push_back(a.capacity());
  return caps;
}

std::size_t MappingScheme::total_capacity() const {
  std::size_t total = 0;
  for (const auto& a : arrays) total += a.capacity();
  return total;
}

void validate_scheme(const MappingScheme& scheme) {
  const auto& arch = scheme.arch;
  auto blocks = NetworkWeights::zeros(arch);
  for (const auto& layout : scheme.arrays) {
    if (validate_dims(layout.dims) != layout.placement.size()) {
      throw std::invalid_argument("layout placement size does not match its extents");
    }
    for (const auto& slot : layout.placement) {
      if (!slot) continue;
      double* target = nullptr;
      switch (slot->block) {
        case WeightBlock::kInput:
          if (slot->row < arch.neurons && slot->col < arch.inputs)
            target = &blocks.input(slot->row, slot->col);
          break;
        case WeightBlock::kRecurrent:
          if (slot->row < arch.neurons && slot->col < arch.neurons)
            target = &blocks.recurrent(slot->row, slot->col);
          break;
        case WeightBlock::kBias:
          if (slot->row < arch.neurons && slot->col == 0) target = &blocks.bias[slot->row];
          break;
      }
      if (target == nullptr) throw std::invalid_argument("placement outside the network");
      *target += 1.0;
    }
  }
  for (double hits : blocks.flatten()) {
    if (hits != 1.0) {
      throw std::invalid_argument("scheme does not cover every weight exactly once");
    }
  }
}

namespace {

WeightSlot input_slot(std::size_t neuron, std::size_t input) {
  return {WeightBlock::kInput, static_cast<std::uint32_t>(neuron),
          static_cast<std::uint32_t>(input)};
}
WeightSlot recurrent_slot(std::size_t target, std::size_t source) {
  return {WeightBlock::kRecurrent, static_cast<std::uint32_t>(target),
          static_cast<std::uint32_t>(source)};
}
WeightSlot bias_slot(std::size_t neuron) {
  return {WeightBlock::kBias, static_cast<std::uint32_t>(neuron), 0};
}

// Observation index of (compartment slice, state variable); slice p holds
// the two base inputs, the rest of that slice is unused.
std::optional<std::size_t> input_index(std::size_t slice, std::size_t var, std::size_t p) {
  if (slice < p) return kStateVarsPerCompartment * slice + var;
  if (var < kBaseInputs) return kStateVarsPerCompartment * p + var;
  return std::nullopt;
}

// Neuron driving grid cell (muscle, compartment column) under Theta2; the
// extra column holds the two rotation neurons and one unused slot.
std::optional<std::size_t> grid_neuron(std::size_t muscle, std::size_t column, std::size_t p) {
  if (column < p) return kMusclesPerCompartment * column + muscle;
  if (muscle < kRotationActions) return kMusclesPerCompartment * p + muscle;
  return std::nullopt;
}

ArrayLayout make_layout(std::vector<std::size_t> dims) {
  ArrayLayout layout;
  layout.placement.resize(validate_dims(dims));
  layout.dims = std::move(dims);
  return layout;
}

MappingScheme psi2(std::size_t p) {
  const auto arch = make_architecture(ArchitectureKind::kTheta1, p);
  const std::size_t n = arch.neurons;
  MappingScheme scheme{SchemeName::kPsi2, p, arch, {}};

  // (neuron, compartment slice, state variable)
  ArrayLayout input = make_layout({n, p + 1, kStateVarsPerCompartment});
  RealArray shape(input.dims);
  for (std::size_t flat = 0; flat < input.capacity(); ++flat) {
    const auto c = shape.coords_of(flat);
    if (auto col = input_index(c[1], c[2], p)) input.placement[flat] = input_slot(c[0], *col);
  }
  ArrayLayout recurrent = make_layout({n, n});
  for (std::size_t r = 0; r < n; ++r)
    for (std::size_t c = 0; c < n; ++c) recurrent.placement[r * n + c] = recurrent_slot(r, c);
  ArrayLayout bias = make_layout({n});
  for (std::size_t r = 0; r < n; ++r) bias.placement[r] = bias_slot(r);

  scheme.arrays = {std::move(input), std::move(recurrent), std::move(bias)};
  return scheme;
}

MappingScheme psi3(std::size_t p) {
  const auto arch = make_architecture(ArchitectureKind::kTheta2, p);
  const std::size_t cols = p + 1;
  const std::size_t m = kMusclesPerCompartment;
  MappingScheme scheme{SchemeName::kPsi3, p, arch, {}};

  // (state variable, source slice, muscle, target column)
  ArrayLayout input = make_layout({kStateVarsPerCompartment, cols, m, cols});
  RealArray in_shape(input.dims);
  for (std::size_t flat = 0; flat < input.capacity(); ++flat) {
    const auto c = in_shape.coords_of(flat);
    auto col = input_index(c[1], c[0], p);
    auto neuron = grid_neuron(c[2], c[3], p);
    if (col && neuron) input.placement[flat] = input_slot(*neuron, *col);
  }
  // (source muscle, source column, target muscle, target column)
  ArrayLayout recurrent = make_layout({m, cols, m, cols});
  RealArray rec_shape(recurrent.dims);
  for (std::size_t flat = 0; flat < recurrent.capacity(); ++flat) {
    const auto c = rec_shape.coords_of(flat);
    auto source = grid_neuron(c[0], c[1], p);
    auto target = grid_neuron(c[2], c[3], p);
    if (source && target) recurrent.placement[flat] = recurrent_slot(*target, *source);
  }
  ArrayLayout bias = make_layout({m, cols});
  for (std::size_t muscle = 0; muscle < m; ++muscle)
    for (std::size_t col = 0; col < cols; ++col)
      if (auto neuron = grid_neuron(muscle, col, p))
        bias.placement[muscle * cols + col] = bias_slot(*neuron);

  scheme.arrays = {std::move(input), std::move(recurrent), std::move(bias)};
  return scheme;
}

}  // namespace

MappingScheme single_matrix_scheme(const NetworkArchitecture& arch) {
  const std::size_t n = arch.neurons;
  const std::size_t i = arch.inputs;
  if (n == 0) throw std::invalid_argument("architecture needs at least one neuron");
  const std::size_t width = i + n + 1;
  MappingScheme scheme{SchemeName::kCustom, 0, arch, {}};
  ArrayLayout layout = make_layout({n, width});
  for (std::size_t r = 0; r < n; ++r) {
    for (std::size_t c = 0; c < width; ++c) {
      WeightSlot slot = c < i ? input_slot(r, c)
                        : c < i + n ? recurrent_slot(r, c - i)
                                    : bias_slot(r);
      layout.placement[r * width + c] = slot;
    }
  }
  scheme.arrays.push_back(std::move(layout));
  return scheme;
}

MappingScheme build_scheme(SchemeName name, ArchitectureKind kind, std::size_t compartments) {
  if (compartments < 1) throw std::invalid_argument("compartment count must be >= 1");
  switch (name) {
    case SchemeName::kPsi1: {
      auto scheme = single_matrix_scheme(make_architecture(kind, compartments));
      scheme.name = SchemeName::kPsi1;
      scheme.compartments = compartments;
      return scheme;
    }
    case SchemeName::kPsi2:
      if (kind != ArchitectureKind::kTheta1)
        throw std::invalid_argument("psi2 requires the meta-action architecture theta1");
      return psi2(compartments);
    case SchemeName::kPsi3:
      if (kind != ArchitectureKind::kTheta2)
        throw std::invalid_argument("psi3 requires the raw-action architecture theta2");
      return psi3(compartments);
    case SchemeName::kCustom:
      break;
  }
  throw std::invalid_argument("custom schemes cannot be built by name");
}

void validate_genome(const Genome& genome) {
  const std::size_t total = std::accumulate(genome.chromosome_lengths.begin(),
                                            genome.chromosome_lengths.end(), std::size_t{0});
  if (total != genome.coefficients.size()) {
    throw std::invalid_argument("chromosome lengths sum to " + std::to_string(total) +
                                " but genome has " + std::to_string(genome.coefficients.size()) +
                                " coefficients");
  }
}

void validate_genome(const Genome& genome, const MappingScheme& scheme) {
  validate_genome(genome);
  if (genome.chromosome_lengths.size() != scheme.chromosome_count()) {
    throw std::invalid_argument("genome has " + std::to_string(genome.chromosome_lengths.size()) +
                                " chromosomes, scheme expects " +
                                std::to_string(scheme.chromosome_count()));
  }
  for (std::size_t m = 0; m < scheme.arrays.size(); ++m) {
    if (genome.chromosome_lengths[m] > scheme.arrays[m].capacity()) {
      throw std::invalid_argument("chromosome exceeds array capacity");
    }
  }
}

std::vector<std::size_t> grow_lengths(std::span<const std::size_t> lengths,
                                      std::span<const std::size_t> capacities,
                                      std::size_t count) {
  if (lengths.size() != capacities.size() || lengths.empty()) {
    throw std::invalid_argument("lengths and capacities must be non-empty and match");
  }
  std::vector<std::size_t> out(lengths.begin(), lengths.end());
  const std::size_t k = out.size();
  auto has_room = [&](std::size_t m) { return out[m] < capacities[m]; };

  std::optional<std::size_t> next;
  for (std::size_t m = 0; m < k; ++m) {
    if (has_room(m) && (!next || out[m] < out[*next])) next = m;
  }
  if (!next) {
    if (count > 0) throw std::invalid_argument("genome at maximum capacity");
    return out;
  }
  std::size_t pos = *next;
  for (std::size_t added = 0; added < count; ++added) {
    std::size_t tries = 0;
    while (!has_room(pos) && tries < k) {
      pos = (pos + 1) % k;
      ++tries;
    }
    if (tries == k) break;  // everything filled up along the way
    ++out[pos];
    pos = (pos + 1) % k;
  }
  return out;
}

std::vector<std::size_t> distribute_coefficients(std::size_t total,
                                                 std::span<const std::size_t> capacities) {
  const std::size_t room = std::accumulate(capacities.begin(), capacities.end(), std::size_t{0});
  if (total > room) {
    throw std::invalid_argument("requested " + std::to_string(total) +
                                " coefficients, scheme holds " + std::to_string(room));
  }
  std::vector<std::size_t> zero(capacities.size(), 0);
  return grow_lengths(zero, capacities, total);
}

Genome make_genome(const MappingScheme& scheme, std::size_t total) {
  Genome g;
  g.chromosome_lengths = distribute_coefficients(total, scheme.capacities());
  g.coefficients.assign(total, 0.0);
  return g;
}

std::vector<double> regroup(std::span<const double> values,
                            std::span<const std::size_t> old_lengths,
                            std::span<const std::size_t> new_lengths, double fill) {
  if (old_lengths.size() != new_lengths.size()) {
    throw std::invalid_argument("chromosome count changed while regrouping");
  }
  std::vector<double> out;
  std::size_t offset = 0;
  for (std::size_t m = 0; m < old_lengths.size(); ++m) {
    if (new_lengths[m] < old_lengths[m]) throw std::invalid_argument("chromosome shrank");
    auto first = values.begin() + static_cast<std::ptrdiff_t>(offset);
    out.insert(out.end(), first, first + static_cast<std::ptrdiff_t>(old_lengths[m]));
    out.insert(out.end(), new_lengths[m] - old_lengths[m], fill);
    offset += old_lengths[m];
  }
  if (offset != values.size()) throw std::invalid_argument("values do not match old layout");
  return out;
}

std::vector<std::vector<double>> split_genome(const Genome& genome, const MappingScheme& scheme) {
  validate_genome(genome, scheme);
  std::vector<std::vector<double>> chromosomes;
  auto it = genome.coefficients.begin();
  for (std::size_t len : genome.chromosome_lengths) {
    auto end = it + static_cast<std::ptrdiff_t>(len);
    chromosomes.emplace_back(it, end);
    it = end;
  }
  return chromosomes;
}

std::vector<RealArray> coefficient_arrays(const Genome& genome, const MappingScheme& scheme) {
  const auto chromosomes = split_genome(genome, scheme);
  std::vector<RealArray> arrays;
  arrays.reserve(chromosomes.size());
  for (std::size_t m = 0; m < chromosomes.size(); ++m) {
    arrays.push_back(fill_array(scheme.arrays[m].dims, chromosomes[m]));
  }
  return arrays;
}

namespace {

double& slot_ref(NetworkWeights& w, const WeightSlot& slot) {
  switch (slot.block) {
    case WeightBlock::kInput: return w.input(slot.row, slot.col);
    case WeightBlock::kRecurrent: return w.recurrent(slot.row, slot.col);
    case WeightBlock::kBias: break;
  }
  return w.bias[slot.row];
}

double slot_value(const NetworkWeights& w, const WeightSlot& slot) {
  switch (slot.block) {
    case WeightBlock::kInput: return w.input(slot.row, slot.col);
    case WeightBlock::kRecurrent: return w.recurrent(slot.row, slot.col);
    case WeightBlock::kBias: break;
  }
  return w.bias[slot.row];
}

NetworkWeights place_arrays(const std::vector<RealArray>& coefficient_arrays,
                            const MappingScheme& scheme) {
  NetworkWeights weights = NetworkWeights::zeros(scheme.arch);
  for (std::size_t m = 0; m < coefficient_arrays.size(); ++m) {
    const RealArray spatial = dct3_nd(coefficient_arrays[m]);
    const auto& placement = scheme.arrays[m].placement;
    for (std::size_t cell = 0; cell < placement.size(); ++cell) {
      if (placement[cell]) slot_ref(weights, *placement[cell]) = spatial[cell];
    }
  }
  return weights;
}

}  // namespace

NetworkWeights decode(const Genome& genome, const MappingScheme& scheme) {
  return place_arrays(coefficient_arrays(genome, scheme), scheme);
}

Genome encode(const NetworkWeights& weights, const MappingScheme& scheme,
              std::optional<std::size_t> total) {
  if (weights.neurons() != scheme.arch.neurons || weights.inputs() != scheme.arch.inputs ||
      weights.recurrent.rows != scheme.arch.neurons ||
      weights.recurrent.cols != scheme.arch.neurons) {
    throw std::invalid_argument("weights do not match the scheme's architecture");
  }
  Genome genome;
  genome.chromosome_lengths = total ? distribute_coefficients(*total, scheme.capacities())
                                    : scheme.capacities();
  for (std::size_t m = 0; m < scheme.arrays.size(); ++m) {
    const auto& layout = scheme.arrays[m];
    RealArray spatial(layout.dims);
    for (std::size_t cell = 0; cell < layout.placement.size(); ++cell) {
      if (layout.placement[cell]) spatial[cell] = slot_value(weights, *layout.placement[cell]);
    }
    const auto coeffs = read_ordered(dct2_nd(spatial), genome.chromosome_lengths[m]);
    genome.coefficients.insert(genome.coefficients.end(), coeffs.begin(), coeffs.end());
  }
  return genome;
}

NetworkWeights resize(const Genome& genome, const MappingScheme& scheme,
                      std::size_t new_compartments) {
  if (new_compartments < 1) throw std::invalid_argument("compartment count must be >= 1");
  if (scheme.name == SchemeName::kCustom) {
    throw std::invalid_argument("custom schemes have no compartment parameterization");
  }
  const auto old_arrays = coefficient_arrays(genome, scheme);
  const auto target = build_scheme(scheme.name, scheme.arch.kind, new_compartments);

  std::vector<RealArray> new_arrays;
  for (std::size_t m = 0; m < old_arrays.size(); ++m) {
    const RealArray& old = old_arrays[m];
    RealArray resized(target.arrays[m].dims);
    for (std::size_t flat = 0; flat < old.size(); ++flat) {
      if (old[flat] == 0.0) continue;
      const auto coords = old.coords_of(flat);
      bool fits = true;
      for (std::size_t j = 0; j < coords.size(); ++j) fits = fits && coords[j] < resized.dims()[j];
      if (fits) resized.at(coords) = old[flat];
    }
    new_arrays.push_back(std::move(resized));
  }
  return place_arrays(new_arrays, target);
}

Genome add_coefficients(const Genome& genome, const MappingScheme& scheme, std::size_t count) {
  if (count < 1) throw std::invalid_argument("coefficient count to add must be positive");
  validate_genome(genome, scheme);
  Genome grown;
  grown.chromosome_lengths = grow_lengths(genome.chromosome_lengths, scheme.capacities(), count);
  grown.coefficients = regroup(genome.coefficients, genome.chromosome_lengths,
                               grown.chromosome_lengths, 0.0);
  return grown;
}

double compression_ratio(std::size_t weights, std::size_t coefficients) {
  if (coefficients == 0) throw std::invalid_argument("coefficient count must be positive");
  return static_cast<double>(weights) / static_cast<double>(coefficients);
}

}  // namespace freqneuro
