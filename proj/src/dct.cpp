#include "freqneuro/dct.hpp"

#include <cmath>
#include <numbers>
#include <stdexcept>
#include <string>
#include <unordered_map>
#include <utility>

namespace freqneuro {

std::size_t validate_dims(std::span<const std::size_t> dims) {
  if (dims.empty() || dims.size() > kMaxRank) {
    throw std::invalid_argument("array rank must be in [1, " +
                                std::to_string(kMaxRank) + "], got " +
                                std::to_string(dims.size()));
  }
  std::size_t count = 1;
  for (std::size_t d : dims) {
    if (d == 0) throw std::invalid_argument("array extent must be positive");
    count *= d;
  }
  return count;
}

RealArray::RealArray(std::vector<std::size_t> dims)
    : dims_(std::move(dims)), data_(validate_dims(dims_), 0.0) {}

RealArray::RealArray(std::vector<std::size_t> dims, std::vector<double> data)
    : dims_(std::move(dims)), data_(std::move(data)) {
  if (validate_dims(dims_) != data_.size()) {
    throw std::invalid_argument("array data length does not match extents");
  }
}

std::size_t RealArray::flat_index(std::span<const std::size_t> coords) const {
  if (coords.size() != dims_.size()) {
    throw std::invalid_argument("coordinate rank mismatch");
  }
  std::size_t flat = 0;
  for (std::size_t j = 0; j < dims_.size(); ++j) {
    if (coords[j] >= dims_[j]) throw std::out_of_range("coordinate out of range");
    flat = flat * dims_[j] + coords[j];
  }
  return flat;
}

std::vector<std::size_t> RealArray::coords_of(std::size_t flat) const {
  std::vector<std::size_t> coords(dims_.size());
  for (std::size_t j = dims_.size(); j-- > 0;) {
    coords[j] = flat % dims_[j];
    flat /= dims_[j];
  }
  return coords;
}

double& RealArray::at(std::span<const std::size_t> coords) {
  return data_[flat_index(coords)];
}

double RealArray::at(std::span<const std::size_t> coords) const {
  return data_[flat_index(coords)];
}

namespace {

// cos(pi/N * n * (k + 1/2)) indexed [n * N + k]. Cached per thread so
// concurrent decoders never share mutable state.
const std::vector<double>& cosine_table(std::size_t n) {
  thread_local std::unordered_map<std::size_t, std::vector<double>> cache;
  auto it = cache.find(n);
  if (it != cache.end()) return it->second;
  std::vector<double> table(n * n);
  const double step = std::numbers::pi / static_cast<double>(n);
  for (std::size_t f = 0; f < n; ++f) {
    for (std::size_t k = 0; k < n; ++k) {
      table[f * n + k] =
          std::cos(step * static_cast<double>(f) * (static_cast<double>(k) + 0.5));
    }
  }
  return cache.emplace(n, std::move(table)).first->second;
}

// Strided line transforms so the n-d code can work in place on a copy.
void inverse_line(const double* in, double* out, std::size_t n, std::size_t stride,
                  const std::vector<double>& table) {
  const double scale = 1.0 / std::sqrt(static_cast<double>(n));
  for (std::size_t k = 0; k < n; ++k) {
    double sum = 0.0;
    for (std::size_t f = 1; f < n; ++f) sum += in[f * stride] * table[f * n + k];
    out[k * stride] = scale * (in[0] + 2.0 * sum);
  }
}

void forward_line(const double* in, double* out, std::size_t n, std::size_t stride,
                  const std::vector<double>& table) {
  const double scale = 1.0 / std::sqrt(static_cast<double>(n));
  for (std::size_t f = 0; f < n; ++f) {
    double sum = 0.0;
    for (std::size_t k = 0; k < n; ++k) sum += in[k * stride] * table[f * n + k];
    out[f * stride] = scale * sum;
  }
}

template <typename LineFn>
RealArray transform_nd(const RealArray& array, LineFn line) {
  validate_dims(array.dims());
  const auto& dims = array.dims();
  RealArray current = array;
  RealArray next(dims);
  for (std::size_t axis = 0; axis < dims.size(); ++axis) {
    const std::size_t n = dims[axis];
    if (n == 1) continue;  // length-1 transform is the identity
    std::size_t inner = 1;
    for (std::size_t j = axis + 1; j < dims.size(); ++j) inner *= dims[j];
    const std::size_t outer = array.size() / (n * inner);
    const auto& table = cosine_table(n);
    const double* src = current.data().data();
    double* dst = next.data().data();
    for (std::size_t o = 0; o < outer; ++o) {
      for (std::size_t i = 0; i < inner; ++i) {
        const std::size_t base = o * n * inner + i;
        line(src + base, dst + base, n, inner, table);
      }
    }
    std::swap(current, next);
  }
  return current;
}

}  // namespace

std::vector<double> dct3_1d(std::span<const double> coeffs) {
  if (coeffs.empty()) throw std::invalid_argument("empty sequence");
  std::vector<double> out(coeffs.size());
  inverse_line(coeffs.data(), out.data(), coeffs.size(), 1,
               cosine_table(coeffs.size()));
  return out;
}

std::vector<double> dct2_1d(std::span<const double> values) {
  if (values.empty()) throw std::invalid_argument("empty sequence");
  std::vector<double> out(values.size());
  forward_line(values.data(), out.data(), values.size(), 1,
               cosine_table(values.size()));
  return out;
}

RealArray dct3_nd(const RealArray& array) { return transform_nd(array, inverse_line); }

RealArray dct2_nd(const RealArray& array) { return transform_nd(array, forward_line); }

}  // namespace freqneuro
