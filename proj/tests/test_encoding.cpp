#include "freqneuro/encoding.hpp"

#include <cmath>
#include <numeric>
#include <random>

#include "doctest.h"
#include "freqneuro/ordering.hpp"
#include "oracles.hpp"
#include "test_util.hpp"

using namespace freqneuro;
using freqneuro::testing::max_abs_diff;
using freqneuro::testing::random_vector;

namespace {

const SchemeName kAllSchemes[] = {SchemeName::kPsi1, SchemeName::kPsi2, SchemeName::kPsi3};

// Psi1 pairs with theta1 and theta2, psi2 with theta1, psi3 with theta2.
std::vector<std::pair<SchemeName, ArchitectureKind>> scheme_pairs() {
  return {{SchemeName::kPsi1, ArchitectureKind::kTheta1},
          {SchemeName::kPsi1, ArchitectureKind::kTheta2},
          {SchemeName::kPsi2, ArchitectureKind::kTheta1},
          {SchemeName::kPsi3, ArchitectureKind::kTheta2}};
}

Genome random_genome(const MappingScheme& scheme, std::size_t total, std::mt19937_64& rng) {
  Genome g = make_genome(scheme, total);
  g.coefficients = random_vector(rng, total);
  return g;
}

NetworkWeights random_weights(const NetworkArchitecture& arch, std::mt19937_64& rng) {
  return NetworkWeights::from_flat(arch, random_vector(rng, arch.weight_count()));
}

// Decodes a single chromosome into an n x (i + n + 1) block matrix without
// using the library's scheme or decoder.
NetworkWeights oracle_single_matrix(std::size_t n, std::size_t i, const std::vector<double>& chrom) {
  const std::vector<std::size_t> dims{n, i + n + 1};
  const auto order = oracle::importance_order(dims);
  std::vector<double> coeffs(n * (i + n + 1), 0.0);
  for (std::size_t j = 0; j < chrom.size(); ++j)
    coeffs[order[j][0] * dims[1] + order[j][1]] = chrom[j];
  const auto w = oracle::dct3_nd(dims, coeffs);
  NetworkWeights out;
  out.input = Matrix(n, i);
  out.recurrent = Matrix(n, n);
  out.bias.assign(n, 0.0);
  for (std::size_t r = 0; r < n; ++r) {
    for (std::size_t c = 0; c < dims[1]; ++c) {
      const double v = w[r * dims[1] + c];
      if (c < i)
        out.input(r, c) = v;
      else if (c < i + n)
        out.recurrent(r, c - i) = v;
      else
        out.bias[r] = v;
    }
  }
  return out;
}

double max_weight_diff(const NetworkWeights& a, const NetworkWeights& b) {
  return max_abs_diff(a.flatten(), b.flatten());
}

}  // namespace

TEST_CASE("architecture arithmetic") {
  const auto t1 = make_architecture(ArchitectureKind::kTheta1, 10);
  const auto t2 = make_architecture(ArchitectureKind::kTheta2, 10);
  CHECK(t1.neurons == 8);
  CHECK(t1.inputs == 82);
  CHECK(t1.weight_count() == 728);
  CHECK(t2.neurons == 32);
  CHECK(t2.inputs == 82);
  CHECK(t2.weight_count() == 3680);
  CHECK(compression_ratio(3680, 20) == 184.0);
  for (std::size_t p = 3; p <= 20; ++p) {
    CHECK(observation_size(p) == 8 * p + 2);
    CHECK(raw_action_size(p) == 3 * p + 2);
  }
  CHECK_THROWS(compression_ratio(10, 0));
}

TEST_CASE("NetworkWeights flat layout") {
  const NetworkArchitecture arch{ArchitectureKind::kCustom, 2, 3, ActionMode::kRaw};
  std::vector<double> flat(arch.weight_count());
  std::iota(flat.begin(), flat.end(), 0.0);
  const auto w = NetworkWeights::from_flat(arch, flat);
  CHECK(w.input(1, 2) == 5.0);
  CHECK(w.recurrent(1, 0) == 8.0);
  CHECK(w.bias[1] == 11.0);
  CHECK(w.flatten() == flat);
  CHECK_THROWS(NetworkWeights::from_flat(arch, std::vector<double>(5)));
}

TEST_CASE("scheme shapes") {
  const auto psi1 = build_scheme(SchemeName::kPsi1, ArchitectureKind::kTheta1, 10);
  REQUIRE(psi1.chromosome_count() == 1);
  CHECK(psi1.arrays[0].dims == std::vector<std::size_t>{8, 91});
  CHECK(psi1.arrays[0].placed_count() == 728);
  CHECK(psi1.total_capacity() == 728);

  const auto psi2 = build_scheme(SchemeName::kPsi2, ArchitectureKind::kTheta1, 10);
  REQUIRE(psi2.chromosome_count() == 3);
  CHECK(psi2.arrays[0].dims == std::vector<std::size_t>{8, 11, 8});
  CHECK(psi2.arrays[0].capacity() == 704);
  CHECK(psi2.arrays[0].placed_count() == 656);
  CHECK(psi2.arrays[0].capacity() - psi2.arrays[0].placed_count() == 48);
  CHECK(psi2.arrays[1].dims == std::vector<std::size_t>{8, 8});
  CHECK(psi2.arrays[2].dims == std::vector<std::size_t>{8});

  const auto psi3 = build_scheme(SchemeName::kPsi3, ArchitectureKind::kTheta2, 10);
  REQUIRE(psi3.chromosome_count() == 3);
  CHECK(psi3.arrays[0].dims == std::vector<std::size_t>{8, 11, 3, 11});
  CHECK(psi3.arrays[1].dims == std::vector<std::size_t>{3, 11, 3, 11});
  CHECK(psi3.arrays[2].dims == std::vector<std::size_t>{3, 11});
  CHECK(psi3.arrays[2].capacity() == 33);
  CHECK(psi3.arrays[2].placed_count() == 32);
  CHECK(psi3.arrays[0].placed_count() == 32 * 82);
  CHECK(psi3.arrays[1].placed_count() == 32 * 32);

  CHECK_THROWS_AS(build_scheme(SchemeName::kPsi2, ArchitectureKind::kTheta2, 10),
                  std::invalid_argument);
  CHECK_THROWS_AS(build_scheme(SchemeName::kPsi3, ArchitectureKind::kTheta1, 10),
                  std::invalid_argument);
  CHECK_THROWS_AS(build_scheme(SchemeName::kPsi1, ArchitectureKind::kTheta1, 0),
                  std::invalid_argument);
}

TEST_CASE("canonical placements") {
  const std::size_t p = 4;
  const auto psi2 = build_scheme(SchemeName::kPsi2, ArchitectureKind::kTheta1, p);
  const RealArray in2(psi2.arrays[0].dims);
  // neuron 3, compartment 2, state variable 5 -> input column 8*2 + 5
  auto slot = psi2.arrays[0].placement[in2.flat_index(std::vector<std::size_t>{3, 2, 5})];
  REQUIRE(slot);
  CHECK(*slot == WeightSlot{WeightBlock::kInput, 3, 21});
  // base inputs sit in the extra slice
  slot = psi2.arrays[0].placement[in2.flat_index(std::vector<std::size_t>{0, p, 1})];
  REQUIRE(slot);
  CHECK(*slot == WeightSlot{WeightBlock::kInput, 0, 8 * p + 1});
  CHECK_FALSE(psi2.arrays[0].placement[in2.flat_index(std::vector<std::size_t>{0, p, 2})]);

  const auto psi3 = build_scheme(SchemeName::kPsi3, ArchitectureKind::kTheta2, p);
  const RealArray bias(psi3.arrays[2].dims);
  // (muscle 2, column 1) drives ventral muscle of compartment 1: neuron 5
  slot = psi3.arrays[2].placement[bias.flat_index(std::vector<std::size_t>{2, 1})];
  REQUIRE(slot);
  CHECK(*slot == WeightSlot{WeightBlock::kBias, 5, 0});
  slot = psi3.arrays[2].placement[bias.flat_index(std::vector<std::size_t>{1, p})];
  REQUIRE(slot);
  CHECK(*slot == WeightSlot{WeightBlock::kBias, 3 * p + 1, 0});
  CHECK_FALSE(psi3.arrays[2].placement[bias.flat_index(std::vector<std::size_t>{2, p})]);
}

TEST_CASE("property: every built-in scheme covers each weight once for p in [3, 20]") {
  for (std::size_t p = 3; p <= 20; ++p) {
    for (auto [name, kind] : scheme_pairs()) {
      const auto scheme = build_scheme(name, kind, p);
      REQUIRE_NOTHROW(validate_scheme(scheme));
      std::size_t placed = 0;
      for (const auto& a : scheme.arrays) placed += a.placed_count();
      REQUIRE(placed == scheme.arch.weight_count());
    }
  }
}

TEST_CASE("validate_scheme rejects gaps and duplicates") {
  auto scheme = build_scheme(SchemeName::kPsi1, ArchitectureKind::kTheta1, 3);
  auto gap = scheme;
  gap.arrays[0].placement[5].reset();
  CHECK_THROWS_AS(validate_scheme(gap), std::invalid_argument);
  auto dup = scheme;
  dup.arrays[0].placement[5] = dup.arrays[0].placement[6];
  CHECK_THROWS_AS(validate_scheme(dup), std::invalid_argument);
}

TEST_CASE("chromosome split examples") {
  const std::vector<std::size_t> caps{100, 100, 100};
  CHECK(distribute_coefficients(10, caps) == std::vector<std::size_t>{4, 3, 3});
  CHECK(distribute_coefficients(3, caps) == std::vector<std::size_t>{1, 1, 1});
  CHECK(grow_lengths(std::vector<std::size_t>{4, 3, 3}, caps, 10) ==
        std::vector<std::size_t>{7, 7, 6});
  CHECK(grow_lengths(std::vector<std::size_t>{1, 1, 1}, caps, 3) ==
        std::vector<std::size_t>{2, 2, 2});
  CHECK(grow_lengths(std::vector<std::size_t>{4, 3, 3}, std::vector<std::size_t>{100, 3, 100}, 3) ==
        std::vector<std::size_t>{5, 3, 5});
  CHECK_THROWS_WITH(grow_lengths(std::vector<std::size_t>{2, 3}, std::vector<std::size_t>{2, 3}, 1),
                    "genome at maximum capacity");

  const auto scheme = build_scheme(SchemeName::kPsi2, ArchitectureKind::kTheta1, 10);
  std::mt19937_64 rng(1);
  const auto g = random_genome(scheme, 10, rng);
  CHECK(g.chromosome_lengths == std::vector<std::size_t>{4, 3, 3});
  const auto parts = split_genome(g, scheme);
  REQUIRE(parts.size() == 3);
  CHECK(parts[0] == std::vector<double>(g.coefficients.begin(), g.coefficients.begin() + 4));
  CHECK(parts[2] == std::vector<double>(g.coefficients.begin() + 7, g.coefficients.end()));

  Genome wrong_k = g;
  wrong_k.chromosome_lengths = {5, 5};
  CHECK_THROWS_AS(split_genome(wrong_k, scheme), std::invalid_argument);
  Genome wrong_sum = g;
  wrong_sum.chromosome_lengths = {4, 3, 4};
  CHECK_THROWS_AS(split_genome(wrong_sum, scheme), std::invalid_argument);
}

TEST_CASE("add_coefficients keeps the network and appends zeros") {
  const auto scheme = build_scheme(SchemeName::kPsi2, ArchitectureKind::kTheta1, 10);
  std::mt19937_64 rng(2);
  const auto g = random_genome(scheme, 10, rng);
  const auto grown = add_coefficients(g, scheme, 10);
  CHECK(grown.chromosome_lengths == std::vector<std::size_t>{7, 7, 6});
  const auto old_parts = split_genome(g, scheme);
  const auto new_parts = split_genome(grown, scheme);
  for (std::size_t m = 0; m < 3; ++m) {
    for (std::size_t j = 0; j < new_parts[m].size(); ++j)
      CHECK(new_parts[m][j] == (j < old_parts[m].size() ? old_parts[m][j] : 0.0));
  }
  CHECK(decode(grown, scheme) == decode(g, scheme));
  CHECK_THROWS(add_coefficients(g, scheme, 0));

  // The bias array of psi2 holds 8 cells; once full it is skipped.
  Genome near_full = make_genome(scheme, 0);
  near_full.chromosome_lengths = {8, 8, 8};
  near_full.coefficients.assign(24, 0.0);
  CHECK(add_coefficients(near_full, scheme, 3).chromosome_lengths ==
        std::vector<std::size_t>{10, 9, 8});

  Genome full = make_genome(scheme, scheme.total_capacity());
  CHECK_THROWS_WITH(add_coefficients(full, scheme, 1), "genome at maximum capacity");
}

TEST_CASE("DC-only genome decodes to constant weights") {
  const auto scheme = build_scheme(SchemeName::kPsi1, ArchitectureKind::kTheta1, 10);
  Genome g = make_genome(scheme, 1);
  g.coefficients[0] = 3.0;
  const auto w = decode(g, scheme);
  const double expected = 3.0 / std::sqrt(728.0);
  for (double v : w.flatten()) CHECK(v == doctest::Approx(expected).epsilon(1e-14));
}

TEST_CASE("one genome, networks of different sizes") {
  const std::vector<double> chrom{5.0, -3.3, 4.1, -9.7, -2.2};
  const std::size_t inputs = 3;
  for (std::size_t n : {2, 3, 5}) {
    const NetworkArchitecture arch{ArchitectureKind::kCustom, n, inputs, ActionMode::kRaw};
    const auto scheme = single_matrix_scheme(arch);
    const Genome g{chrom, {chrom.size()}};
    const auto w = decode(g, scheme);
    CHECK(w.neurons() == n);
    CHECK(w.inputs() == inputs);
    CHECK(w.recurrent.rows == n);
    CHECK(max_weight_diff(w, oracle_single_matrix(n, inputs, chrom)) < 1e-12);
  }
}

TEST_CASE("decode rejects oversize chromosomes") {
  const auto scheme = build_scheme(SchemeName::kPsi2, ArchitectureKind::kTheta1, 3);
  Genome g;
  g.chromosome_lengths = {1, 1, 9};
  g.coefficients.assign(11, 1.0);
  CHECK_THROWS(decode(g, scheme));
}

TEST_CASE("encode matches the brute-force forward transform") {
  const auto arch = make_architecture(ArchitectureKind::kTheta1, 4);
  const auto scheme = build_scheme(SchemeName::kPsi1, ArchitectureKind::kTheta1, 4);
  std::mt19937_64 rng(8);
  const auto w = random_weights(arch, rng);
  const std::size_t n = arch.neurons;
  const std::size_t cols = arch.inputs + n + 1;
  std::vector<double> spatial(n * cols);
  for (std::size_t r = 0; r < n; ++r) {
    for (std::size_t c = 0; c < arch.inputs; ++c) spatial[r * cols + c] = w.input(r, c);
    for (std::size_t c = 0; c < n; ++c) spatial[r * cols + arch.inputs + c] = w.recurrent(r, c);
    spatial[r * cols + cols - 1] = w.bias[r];
  }
  const std::vector<std::size_t> dims{n, cols};
  const auto coeffs = oracle::dct2_nd(dims, spatial);
  const auto order = oracle::importance_order(dims);
  const auto g = encode(w, scheme);
  REQUIRE(g.size() == n * cols);
  for (std::size_t j = 0; j < g.size(); ++j)
    REQUIRE(g.coefficients[j] == doctest::Approx(coeffs[order[j][0] * cols + order[j][1]]).epsilon(1e-12));

  const auto truncated = encode(w, scheme, 30);
  CHECK(truncated.size() == 30);
  CHECK(std::equal(truncated.coefficients.begin(), truncated.coefficients.end(),
                   g.coefficients.begin()));
}

TEST_CASE("constant weights encode to DC terms") {
  for (auto [name, kind] : scheme_pairs()) {
    const auto scheme = build_scheme(name, kind, 3);
    const auto arch = scheme.arch;
    const auto w = NetworkWeights::from_flat(arch, std::vector<double>(arch.weight_count(), 0.7));
    const auto g = encode(w, scheme);
    const auto parts = split_genome(g, scheme);
    for (std::size_t m = 0; m < parts.size(); ++m) {
      CHECK(parts[m][0] != 0.0);
      // Fully placed arrays are exactly constant, so only DC survives.
      if (scheme.arrays[m].placed_count() == scheme.arrays[m].capacity()) {
        for (std::size_t j = 1; j < parts[m].size(); ++j) REQUIRE(std::abs(parts[m][j]) < 1e-12);
      }
    }
  }
}

TEST_CASE("property: full-rank identities for p in {3, 10, 20}") {
  std::mt19937_64 rng(31);
  for (std::size_t p : {3, 10, 20}) {
    for (auto [name, kind] : scheme_pairs()) {
      const auto scheme = build_scheme(name, kind, p);
      for (int trial = 0; trial < 2; ++trial) {
        const auto w = random_weights(scheme.arch, rng);
        const auto g = encode(w, scheme);
        REQUIRE(g.size() == scheme.total_capacity());
        REQUIRE(max_weight_diff(decode(g, scheme), w) < 1e-9);
        REQUIRE(max_abs_diff(encode(decode(g, scheme), scheme).coefficients, g.coefficients) < 1e-9);

        // Arbitrary full genome: unused cells are projected away once,
        // after which the pair is an identity.
        const auto any = random_genome(scheme, scheme.total_capacity(), rng);
        const auto projected = encode(decode(any, scheme), scheme);
        REQUIRE(max_abs_diff(encode(decode(projected, scheme), scheme).coefficients,
                             projected.coefficients) < 1e-9);
        if (name == SchemeName::kPsi1)
          REQUIRE(max_abs_diff(projected.coefficients, any.coefficients) < 1e-9);
      }
    }
  }
}

TEST_CASE("property: band limit of truncated genomes") {
  std::mt19937_64 rng(37);
  for (std::size_t p : {3, 10}) {
    for (auto [name, kind] : scheme_pairs()) {
      const auto scheme = build_scheme(name, kind, p);
      for (std::size_t total : {1, 7, 20, 55}) {
        const auto g = random_genome(scheme, total, rng);
        // Array level, every scheme: the spectrum beyond each prefix is zero.
        const auto arrays = coefficient_arrays(g, scheme);
        for (std::size_t m = 0; m < arrays.size(); ++m) {
          const auto back = read_ordered(dct2_nd(dct3_nd(arrays[m])), arrays[m].size());
          for (std::size_t j = g.chromosome_lengths[m]; j < back.size(); ++j)
            REQUIRE(std::abs(back[j]) < 1e-9);
        }
        // Weight level, psi1: the decoded network re-encodes to the prefix.
        if (name == SchemeName::kPsi1) {
          const auto full = encode(decode(g, scheme), scheme);
          for (std::size_t j = 0; j < full.size(); ++j) {
            const double expected = j < total ? g.coefficients[j] : 0.0;
            REQUIRE(std::abs(full.coefficients[j] - expected) < 1e-9);
          }
        }
      }
    }
  }
}

TEST_CASE("property: continuity under a single coefficient change") {
  std::mt19937_64 rng(41);
  const double eps = 1e-6;
  for (auto [name, kind] : scheme_pairs()) {
    const auto scheme = build_scheme(name, kind, 5);
    for (int trial = 0; trial < 5; ++trial) {
      const auto g = random_genome(scheme, 40, rng);
      const std::size_t j = std::uniform_int_distribution<std::size_t>(0, 39)(rng);
      Genome h = g;
      h.coefficients[j] += eps;
      // Locate the chromosome of coefficient j to get its array extents.
      std::size_t m = 0;
      std::size_t start = 0;
      while (start + g.chromosome_lengths[m] <= j) start += g.chromosome_lengths[m++];
      double bound = eps;
      for (std::size_t d : scheme.arrays[m].dims) bound *= 2.0 / std::sqrt(double(d));
      const auto a = decode(g, scheme).flatten();
      const auto b = decode(h, scheme).flatten();
      REQUIRE(max_abs_diff(a, b) <= bound * (1.0 + 1e-6));
    }
  }
}

TEST_CASE("property: any genome size decodes for p in [3, 20]") {
  std::mt19937_64 rng(43);
  for (std::size_t p = 3; p <= 20; ++p) {
    for (auto [name, kind] : scheme_pairs()) {
      const auto scheme = build_scheme(name, kind, p);
      const std::size_t cap = scheme.total_capacity();
      std::vector<std::size_t> sizes{1, 2, cap};
      for (int k = 0; k < 3; ++k) sizes.push_back(std::uniform_int_distribution<std::size_t>(1, cap)(rng));
      for (std::size_t total : sizes) {
        const auto w = decode(random_genome(scheme, total, rng), scheme);
        REQUIRE(w.neurons() == scheme.arch.neurons);
        REQUIRE(w.inputs() == 8 * p + 2);
      }
    }
  }
}

TEST_CASE("resize at the same p is exact") {
  std::mt19937_64 rng(47);
  for (auto [name, kind] : scheme_pairs()) {
    const auto scheme = build_scheme(name, kind, 6);
    const auto g = random_genome(scheme, 25, rng);
    CHECK(resize(g, scheme, 6) == decode(g, scheme));
  }
  const auto scheme = build_scheme(SchemeName::kPsi1, ArchitectureKind::kTheta1, 6);
  CHECK_THROWS(resize(make_genome(scheme, 3), scheme, 0));
  CHECK_THROWS(resize(make_genome(scheme, 3), single_matrix_scheme(scheme.arch), 5));
}

TEST_CASE("DC genome resized to a longer arm stays constant") {
  const auto scheme = build_scheme(SchemeName::kPsi1, ArchitectureKind::kTheta1, 10);
  Genome g = make_genome(scheme, 1);
  g.coefficients[0] = 2.0;
  const auto w = resize(g, scheme, 20);
  CHECK(w.inputs() == 162);
  const double expected = 2.0 / std::sqrt(8.0 * (162 + 8 + 1));
  for (double v : w.flatten()) CHECK(v == doctest::Approx(expected).epsilon(1e-14));
}

TEST_CASE("psi1 genome shrunk from p=10 to p=5 equals a hand-built decode") {
  const auto scheme = build_scheme(SchemeName::kPsi1, ArchitectureKind::kTheta1, 10);
  std::mt19937_64 rng(53);
  const auto g = random_genome(scheme, 20, rng);
  // The 20 leading cells of the 8 x 91 order all fit in 8 x 51, so they
  // keep their coordinates in the smaller matrix.
  const auto big_order = oracle::importance_order({8, 91});
  const std::vector<std::size_t> small{8, 51};
  std::vector<double> coeffs(8 * 51, 0.0);
  for (std::size_t j = 0; j < 20; ++j) {
    REQUIRE(big_order[j][1] < 51);
    coeffs[big_order[j][0] * 51 + big_order[j][1]] = g.coefficients[j];
  }
  const auto values = oracle::dct3_nd(small, coeffs);
  const auto w = resize(g, scheme, 5);
  REQUIRE(w.inputs() == 42);
  for (std::size_t r = 0; r < 8; ++r) {
    for (std::size_t c = 0; c < 42; ++c) REQUIRE(std::abs(w.input(r, c) - values[r * 51 + c]) < 1e-12);
    for (std::size_t c = 0; c < 8; ++c)
      REQUIRE(std::abs(w.recurrent(r, c) - values[r * 51 + 42 + c]) < 1e-12);
    REQUIRE(std::abs(w.bias[r] - values[r * 51 + 50]) < 1e-12);
  }
}

TEST_CASE("resize drops coefficients that no longer fit") {
  // Full-rank psi3 genome at p=6 resized to p=3: cells with a column
  // coordinate beyond 3 vanish, the rest are kept.
  const auto scheme = build_scheme(SchemeName::kPsi3, ArchitectureKind::kTheta2, 6);
  std::mt19937_64 rng(59);
  const auto g = random_genome(scheme, scheme.total_capacity(), rng);
  const auto w = resize(g, scheme, 3);
  CHECK(w.neurons() == 11);
  CHECK(w.inputs() == 26);
  for (double v : w.flatten()) CHECK(std::isfinite(v));
}

TEST_CASE("scheme and architecture names") {
  for (auto name : kAllSchemes) CHECK(parse_scheme_name(to_string(name)) == name);
  CHECK(parse_architecture("theta1") == ArchitectureKind::kTheta1);
  CHECK(parse_architecture(to_string(ArchitectureKind::kTheta2)) == ArchitectureKind::kTheta2);
  CHECK_THROWS(parse_scheme_name("psi9"));
  CHECK_THROWS(parse_architecture("theta7"));
}
