#ifndef FREQNEURO_DCT_HPP_
#define FREQNEURO_DCT_HPP_

#include <cstddef>
#include <span>
#include <vector>

namespace freqneuro {

inline constexpr std::size_t kMaxRank = 4;

// Dense real array of rank 1..4 stored in row-major order (last axis
// fastest). Holds both coefficient arrays and decoded weight arrays.
class RealArray {
 public:
  RealArray() = default;
  // Zero-filled array with the given extents.
  explicit RealArray(std::vector<std::size_t> dims);
  RealArray(std::vector<std::size_t> dims, std::vector<double> data);

  const std::vector<std::size_t>& dims() const { return dims_; }
  std::size_t rank() const { return dims_.size(); }
  std::size_t size() const { return data_.size(); }

  std::span<double> data() { return data_; }
  std::span<const double> data() const { return data_; }

  double& operator[](std::size_t flat) { return data_[flat]; }
  double operator[](std::size_t flat) const { return data_[flat]; }

  double& at(std::span<const std::size_t> coords);
  double at(std::span<const std::size_t> coords) const;

  std::size_t flat_index(std::span<const std::size_t> coords) const;
  std::vector<std::size_t> coords_of(std::size_t flat) const;

 private:
  std::vector<std::size_t> dims_;
  std::vector<double> data_;
};

// Checks 1 <= rank <= kMaxRank and every extent >= 1; throws
// std::invalid_argument otherwise. Returns the cell count.
std::size_t validate_dims(std::span<const std::size_t> dims);

// Inverse (type-III) transform:
//   w_k = (c_0 + 2 sum_{n>=1} c_n cos(pi/N n (k + 1/2))) / sqrt(N)
std::vector<double> dct3_1d(std::span<const double> coeffs);

// Forward (type-II) transform, normalized so that dct3_1d inverts it:
//   c_n = sum_k x_k cos(pi/N n (k + 1/2)) / sqrt(N)
std::vector<double> dct2_1d(std::span<const double> values);

// Separable transforms. The 1D transform is applied along axis 0 first,
// then axis 1, and so on. Output has the input's extents.
RealArray dct3_nd(const RealArray& array);
RealArray dct2_nd(const RealArray& array);

}  // namespace freqneuro

#endif  // FREQNEURO_DCT_HPP_
