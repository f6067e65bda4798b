#ifndef FREQNEURO_ORDERING_HPP_
#define FREQNEURO_ORDERING_HPP_

#include <cstddef>
#include <memory>
#include <span>
#include <vector>

#include "freqneuro/dct.hpp"

namespace freqneuro {

using CellIndex = std::vector<std::size_t>;

// Total order on the cells of an array, from low to high frequency.
struct ImportanceOrder {
  std::vector<std::size_t> dims;
  std::vector<CellIndex> cells;    // ordered coordinates
  std::vector<std::size_t> flat;   // same cells as row-major offsets
};

// Orders cells simplex by simplex (cells whose coordinates sum to i, for
// increasing i). Within a simplex, the axis-extreme corner points are
// visited cyclically, longest axis first (ties keep axis order), and each
// visit takes the remaining cell closest to that corner. Distance ties go
// to the lexicographically smallest coordinates. The corner cycle restarts
// at every simplex, so in 2D each secondary diagonal is filled from its
// two ends toward the middle, starting on the longer side.
ImportanceOrder simplex_order(std::span<const std::size_t> dims);

// Shared, lazily computed orders. Safe to call from concurrent decoders.
std::shared_ptr<const ImportanceOrder> cached_simplex_order(
    std::span<const std::size_t> dims);

// Writes chromosome[j] into the j-th ordered cell; all later cells are 0.
RealArray fill_array(std::span<const std::size_t> dims,
                     std::span<const double> chromosome);

// Reads the first `count` values of an array along its importance order.
std::vector<double> read_ordered(const RealArray& array, std::size_t count);

}  // namespace freqneuro

#endif  // FREQNEURO_ORDERING_HPP_
