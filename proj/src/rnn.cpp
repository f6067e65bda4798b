#include "freqneuro/rnn.hpp"

#include <cmath>
#include <stdexcept>
#include <string>

namespace freqneuro {

RnnState reset(std::size_t neurons) { return RnnState{std::vector<double>(neurons, 0.0)}; }

StepResult step(const NetworkWeights& weights, const RnnState& state,
                std::span<const double> input, Activation activation) {
  const std::size_t n = weights.neurons();
  if (input.size() != weights.inputs()) {
    throw std::invalid_argument("network expects " + std::to_string(weights.inputs()) +
                                " inputs, got " + std::to_string(input.size()));
  }
  if (state.activations.size() != n) throw std::invalid_argument("state size mismatch");
  for (double x : input) {
    if (!std::isfinite(x)) throw std::invalid_argument("non-finite network input");
  }

  StepResult result;
  result.state.activations.resize(n);
  result.outputs.resize(n);
  for (std::size_t r = 0; r < n; ++r) {
    double sum = weights.bias[r];
    const double* in_row = &weights.input.values[r * weights.input.cols];
    for (std::size_t c = 0; c < input.size(); ++c) sum += in_row[c] * input[c];
    const double* rec_row = &weights.recurrent.values[r * n];
    for (std::size_t c = 0; c < n; ++c) sum += rec_row[c] * state.activations[c];

    if (activation == Activation::kTanh) {
      const double a = std::tanh(sum);
      result.state.activations[r] = a;
      result.outputs[r] = 0.5 * (a + 1.0);
    } else {
      const double a = 1.0 / (1.0 + std::exp(-sum));
      result.state.activations[r] = a;
      result.outputs[r] = a;
    }
  }
  return result;
}

}  // namespace freqneuro
