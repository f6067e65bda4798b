#include "freqneuro/genome_io.hpp"

#include <charconv>
#include <fstream>
#include <iomanip>
#include <istream>
#include <limits>
#include <ostream>
#include <sstream>
#include <stdexcept>

namespace freqneuro {

namespace {

void expect_token(std::istream& in, const char* token) {
  std::string word;
  if (!(in >> word) || word != token) {
    throw std::runtime_error(std::string("malformed header: expected '") + token + "'");
  }
}

template <typename T>
T read_value(std::istream& in, const char* what) {
  T value{};
  if (!(in >> value)) throw std::runtime_error(std::string("malformed header: bad ") + what);
  return value;
}

double read_number(std::istream& in) {
  std::string text;
  if (!(in >> text)) throw std::runtime_error("genome file ended early");
  double value = 0.0;
  const auto [ptr, ec] = std::from_chars(text.data(), text.data() + text.size(), value);
  if (ec != std::errc{} || ptr != text.data() + text.size()) {
    throw std::runtime_error("bad number '" + text + "' in genome file");
  }
  return value;
}

void write_number(std::ostream& out, double value) {
  out << std::setprecision(std::numeric_limits<double>::max_digits10) << value << '\n';
}

}  // namespace

void write_genome(std::ostream& out, const GenomeFile& file) {
  validate_genome(file.genome);
  const auto& lengths = file.genome.chromosome_lengths;
  out << "k " << lengths.size() << " lengths";
  for (std::size_t len : lengths) out << ' ' << len;
  out << " scheme " << file.header.scheme << " p " << file.header.compartments << " arch "
      << to_string(file.header.arch) << '\n';
  for (double c : file.genome.coefficients) write_number(out, c);
}

GenomeFile read_genome(std::istream& in) {
  std::string line;
  if (!std::getline(in, line)) throw std::runtime_error("empty genome file");
  std::istringstream header(line);
  GenomeFile file;
  expect_token(header, "k");
  const auto k = read_value<std::size_t>(header, "chromosome count");
  expect_token(header, "lengths");
  for (std::size_t m = 0; m < k; ++m) {
    file.genome.chromosome_lengths.push_back(read_value<std::size_t>(header, "length"));
  }
  expect_token(header, "scheme");
  file.header.scheme = read_value<std::string>(header, "scheme");
  expect_token(header, "p");
  file.header.compartments = read_value<std::size_t>(header, "compartment count");
  expect_token(header, "arch");
  file.header.arch = parse_architecture(read_value<std::string>(header, "architecture"));

  std::size_t total = 0;
  for (std::size_t len : file.genome.chromosome_lengths) total += len;
  file.genome.coefficients.reserve(total);
  for (std::size_t j = 0; j < total; ++j) file.genome.coefficients.push_back(read_number(in));
  std::string extra;
  if (in >> extra) throw std::runtime_error("genome file has trailing data");
  return file;
}

void save_genome(const std::string& path, const GenomeFile& file) {
  std::ofstream out(path);
  if (!out) throw std::runtime_error("cannot write " + path);
  write_genome(out, file);
}

GenomeFile load_genome(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw std::runtime_error("cannot read " + path);
  return read_genome(in);
}

void write_weights(std::ostream& out, const NetworkWeights& weights, ArchitectureKind arch,
                   std::size_t compartments) {
  out << "weights n " << weights.neurons() << " i " << weights.inputs() << " arch "
      << to_string(arch) << " p " << compartments << '\n';
  for (double w : weights.flatten()) write_number(out, w);
}

NetworkWeights read_weights(std::istream& in) {
  std::string line;
  if (!std::getline(in, line)) throw std::runtime_error("empty weight file");
  std::istringstream header(line);
  expect_token(header, "weights");
  expect_token(header, "n");
  NetworkArchitecture arch;
  arch.neurons = read_value<std::size_t>(header, "neuron count");
  expect_token(header, "i");
  arch.inputs = read_value<std::size_t>(header, "input count");
  std::vector<double> flat(arch.weight_count());
  for (double& w : flat) w = read_number(in);
  return NetworkWeights::from_flat(arch, flat);
}

}  // namespace freqneuro
