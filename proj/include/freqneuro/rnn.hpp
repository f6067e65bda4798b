#ifndef FREQNEURO_RNN_HPP_
#define FREQNEURO_RNN_HPP_

#include <cstddef>
#include <span>
#include <vector>

#include "freqneuro/encoding.hpp"

namespace freqneuro {

// Squashing function of the recurrent units. Outputs are mapped to [0, 1]:
// (a + 1) / 2 for tanh, the activation itself for the logistic.
enum class Activation { kTanh, kLogistic };

struct RnnState {
  std::vector<double> activations;
};

struct StepResult {
  RnnState state;
  std::vector<double> outputs;
};

RnnState reset(std::size_t neurons);

// Synchronous update: a' = f(W_in x + W_rec a + b). Every neuron reads the
// previous step's activations.
StepResult step(const NetworkWeights& weights, const RnnState& state,
                std::span<const double> input, Activation activation = Activation::kTanh);

}  // namespace freqneuro

#endif  // FREQNEURO_RNN_HPP_
