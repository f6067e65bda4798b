#ifndef FREQNEURO_TOOLS_SELFTEST_HPP_
#define FREQNEURO_TOOLS_SELFTEST_HPP_

#include <cstdint>
#include <iosfwd>

namespace freqneuro::cli {

// Compares the library against the brute-force oracles on random inputs.
// Prints one line per check and returns the number of failures.
int run_selftest(std::ostream& out, std::uint64_t seed, int trials);

}  // namespace freqneuro::cli

#endif  // FREQNEURO_TOOLS_SELFTEST_HPP_
