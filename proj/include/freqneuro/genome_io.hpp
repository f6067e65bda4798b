#ifndef FREQNEURO_GENOME_IO_HPP_
#define FREQNEURO_GENOME_IO_HPP_

#include <cstddef>
#include <iosfwd>
#include <string>

#include "freqneuro/encoding.hpp"

namespace freqneuro {

// Header of a genome file. `scheme` is a scheme name or "direct" for a
// genome that stores raw weights (single chromosome, flat weight layout).
struct GenomeHeader {
  std::string scheme;
  std::size_t compartments = 0;
  ArchitectureKind arch = ArchitectureKind::kTheta1;
};

struct GenomeFile {
  GenomeHeader header;
  Genome genome;
};

// Text format:
//   k <k> lengths <l_1> ... <l_k> scheme <name> p <p> arch <arch>
// followed by one coefficient per line, printed with 17 significant digits.
void write_genome(std::ostream& out, const GenomeFile& file);
GenomeFile read_genome(std::istream& in);

void save_genome(const std::string& path, const GenomeFile& file);
GenomeFile load_genome(const std::string& path);

// Weight file: header "weights n <n> i <i> arch <arch> p <p>", then the
// flat weight vector (input, recurrent, bias), one value per line.
void write_weights(std::ostream& out, const NetworkWeights& weights, ArchitectureKind arch,
                   std::size_t compartments);
NetworkWeights read_weights(std::istream& in);

}  // namespace freqneuro

#endif  // FREQNEURO_GENOME_IO_HPP_
