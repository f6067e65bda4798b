#include "freqneuro/ordering.hpp"

#include <algorithm>
#include <map>
#include <mutex>
#include <numeric>
#include <stdexcept>

namespace freqneuro {

namespace {

std::size_t squared_distance(const CellIndex& a, const CellIndex& b) {
  std::size_t sum = 0;
  for (std::size_t j = 0; j < a.size(); ++j) {
    const std::size_t diff = a[j] > b[j] ? a[j] - b[j] : b[j] - a[j];
    sum += diff * diff;
  }
  return sum;
}

}  // namespace

ImportanceOrder simplex_order(std::span<const std::size_t> dims) {
  const std::size_t count = validate_dims(dims);
  const std::size_t rank = dims.size();
  const RealArray shape{std::vector<std::size_t>(dims.begin(), dims.end())};

  std::size_t max_sum = 0;
  for (std::size_t d : dims) max_sum += d - 1;

  // Row-major enumeration keeps each bucket lexicographically sorted.
  std::vector<std::vector<CellIndex>> simplexes(max_sum + 1);
  for (std::size_t flat = 0; flat < count; ++flat) {
    CellIndex cell = shape.coords_of(flat);
    const std::size_t sum = std::accumulate(cell.begin(), cell.end(), std::size_t{0});
    simplexes[sum].push_back(std::move(cell));
  }

  std::vector<std::size_t> axes;
  for (std::size_t j = 0; j < rank; ++j) {
    if (dims[j] > 1) axes.push_back(j);
  }
  std::stable_sort(axes.begin(), axes.end(),
                   [&](std::size_t a, std::size_t b) { return dims[a] > dims[b]; });
  std::vector<CellIndex> corners;
  for (std::size_t j : axes) {
    CellIndex corner(rank, 0);
    corner[j] = dims[j] - 1;
    corners.push_back(std::move(corner));
  }

  ImportanceOrder order;
  order.dims.assign(dims.begin(), dims.end());
  order.cells.reserve(count);
  order.flat.reserve(count);
  for (auto& remaining : simplexes) {
    std::size_t visit = 0;
    while (!remaining.empty()) {
      std::size_t pick = 0;
      if (!corners.empty()) {
        const CellIndex& corner = corners[visit % corners.size()];
        std::size_t best = squared_distance(remaining[0], corner);
        for (std::size_t c = 1; c < remaining.size(); ++c) {
          const std::size_t dist = squared_distance(remaining[c], corner);
          if (dist < best) {
            best = dist;
            pick = c;
          }
        }
      }
      ++visit;
      order.flat.push_back(shape.flat_index(remaining[pick]));
      order.cells.push_back(std::move(remaining[pick]));
      remaining.erase(remaining.begin() + static_cast<std::ptrdiff_t>(pick));
    }
  }
  return order;
}

std::shared_ptr<const ImportanceOrder> cached_simplex_order(
    std::span<const std::size_t> dims) {
  static std::mutex mutex;
  static std::map<std::vector<std::size_t>, std::shared_ptr<const ImportanceOrder>> cache;
  std::vector<std::size_t> key(dims.begin(), dims.end());
  {
    std::lock_guard lock(mutex);
    auto it = cache.find(key);
    if (it != cache.end()) return it->second;
  }
  // Computed outside the lock; a racing duplicate is identical and discarded.
  auto order = std::make_shared<const ImportanceOrder>(simplex_order(dims));
  std::lock_guard lock(mutex);
  return cache.emplace(std::move(key), std::move(order)).first->second;
}

RealArray fill_array(std::span<const std::size_t> dims,
                     std::span<const double> chromosome) {
  RealArray array(std::vector<std::size_t>(dims.begin(), dims.end()));
  if (chromosome.size() > array.size()) {
    throw std::invalid_argument("chromosome exceeds array capacity");
  }
  if (chromosome.empty()) return array;
  const auto order = cached_simplex_order(dims);
  for (std::size_t j = 0; j < chromosome.size(); ++j) {
    array[order->flat[j]] = chromosome[j];
  }
  return array;
}

std::vector<double> read_ordered(const RealArray& array, std::size_t count) {
  if (count > array.size()) {
    throw std::invalid_argument("requested more coefficients than array cells");
  }
  const auto order = cached_simplex_order(array.dims());
  std::vector<double> out(count);
  for (std::size_t j = 0; j < count; ++j) out[j] = array[order->flat[j]];
  return out;
}

}  // namespace freqneuro
