#include "freqneuro/rnn.hpp"

#include <cmath>
#include <limits>
#include <random>

#include "doctest.h"
#include "test_util.hpp"

using namespace freqneuro;

namespace {

NetworkArchitecture custom(std::size_t n, std::size_t i) {
  return {ArchitectureKind::kCustom, n, i, ActionMode::kRaw};
}

}  // namespace

TEST_CASE("reset gives zero activations") {
  CHECK(reset(8).activations == std::vector<double>(8, 0.0));
  CHECK(reset(32).activations == std::vector<double>(32, 0.0));
}

TEST_CASE("zero weights give outputs of one half") {
  const auto w = NetworkWeights::zeros(make_architecture(ArchitectureKind::kTheta1, 10));
  const std::vector<double> input(82, 3.0);
  const auto r = step(w, reset(8), input);
  CHECK(r.state.activations == std::vector<double>(8, 0.0));
  CHECK(r.outputs == std::vector<double>(8, 0.5));
}

TEST_CASE("bias only neuron") {
  auto w = NetworkWeights::zeros(custom(1, 0));
  w.bias[0] = 0.8;
  const auto r = step(w, reset(1), std::vector<double>{});
  CHECK(r.state.activations[0] == doctest::Approx(std::tanh(0.8)).epsilon(1e-15));
  CHECK(r.outputs[0] == doctest::Approx((std::tanh(0.8) + 1.0) / 2.0));

  const auto logistic = step(w, reset(1), std::vector<double>{}, Activation::kLogistic);
  CHECK(logistic.outputs[0] == doctest::Approx(1.0 / (1.0 + std::exp(-0.8))));
}

TEST_CASE("three neuron trace matches straight-line evaluation") {
  std::mt19937_64 rng(12);
  const auto arch = custom(3, 2);
  const auto flat = freqneuro::testing::random_vector(rng, arch.weight_count(), -1.0, 1.0);
  const auto w = NetworkWeights::from_flat(arch, flat);
  // flat = [W_in (3x2) | W_rec (3x3) | b (3)]
  const double* wi = flat.data();
  const double* wr = flat.data() + 6;
  const double* b = flat.data() + 15;
  const double x1[2] = {0.3, -1.2};
  const double x2[2] = {2.0, 0.5};

  double a1[3];
  for (int r = 0; r < 3; ++r) a1[r] = std::tanh(wi[2 * r] * x1[0] + wi[2 * r + 1] * x1[1] + b[r]);
  double a2[3];
  for (int r = 0; r < 3; ++r) {
    a2[r] = std::tanh(wi[2 * r] * x2[0] + wi[2 * r + 1] * x2[1] + wr[3 * r] * a1[0] +
                      wr[3 * r + 1] * a1[1] + wr[3 * r + 2] * a1[2] + b[r]);
  }

  const auto s1 = step(w, reset(3), x1);
  const auto s2 = step(w, s1.state, x2);
  for (int r = 0; r < 3; ++r) {
    CHECK(s1.state.activations[r] == doctest::Approx(a1[r]).epsilon(1e-14));
    CHECK(s2.state.activations[r] == doctest::Approx(a2[r]).epsilon(1e-14));
    CHECK(s2.outputs[r] == doctest::Approx((a2[r] + 1.0) / 2.0).epsilon(1e-14));
  }
}

TEST_CASE("input errors") {
  const auto w = NetworkWeights::zeros(custom(2, 3));
  CHECK_THROWS(step(w, reset(2), std::vector<double>{1.0, 2.0}));
  CHECK_THROWS(step(w, reset(3), std::vector<double>{1.0, 2.0, 3.0}));
  CHECK_THROWS(step(w, reset(2), std::vector<double>{1.0, std::nan(""), 3.0}));
  CHECK_THROWS(step(w, reset(2), std::vector<double>{1.0, std::numeric_limits<double>::infinity(), 3.0}));
}

TEST_CASE("property: determinism and bounds") {
  std::mt19937_64 rng(13);
  for (int trial = 0; trial < 200; ++trial) {
    const std::size_t n = 1 + trial % 9;
    const std::size_t i = trial % 7;
    const auto arch = custom(n, i);
    const auto w = NetworkWeights::from_flat(
        arch, freqneuro::testing::random_vector(rng, arch.weight_count(), -50.0, 50.0));
    RnnState a = reset(n);
    RnnState b = reset(n);
    for (int t = 0; t < 10; ++t) {
      const auto x = freqneuro::testing::random_vector(rng, i, -100.0, 100.0);
      const auto ra = step(w, a, x);
      const auto rb = step(w, b, x);
      REQUIRE(ra.outputs == rb.outputs);
      REQUIRE(ra.state.activations == rb.state.activations);
      for (std::size_t r = 0; r < n; ++r) {
        REQUIRE(ra.outputs[r] >= 0.0);
        REQUIRE(ra.outputs[r] <= 1.0);
        REQUIRE(std::abs(ra.state.activations[r]) <= 1.0);
      }
      a = ra.state;
      b = rb.state;
    }
  }
}
