#pragma once

#include <cstddef>
#include <cstdint>
#include <span>
#include <vector>

namespace gridqr {

/// Column-major dense matrix of doubles.
///
/// Element (i, j) lives at data()[i + j * rows()]. Columns are contiguous,
/// which is what the Householder kernels walk.
class DenseMatrix {
 public:
  DenseMatrix() = default;
  DenseMatrix(std::size_t rows, std::size_t cols);
  DenseMatrix(std::size_t rows, std::size_t cols, std::vector<double> column_major);

  /// rows x cols matrix with ones on the main diagonal.
  static DenseMatrix identity(std::size_t rows, std::size_t cols);

  std::size_t rows() const noexcept { return rows_; }
  std::size_t cols() const noexcept { return cols_; }
  bool empty() const noexcept { return data_.empty(); }

  double& operator()(std::size_t i, std::size_t j) noexcept { return data_[i + j * rows_]; }
  double operator()(std::size_t i, std::size_t j) const noexcept { return data_[i + j * rows_]; }

  std::span<double> col(std::size_t j) noexcept { return {data_.data() + j * rows_, rows_}; }
  std::span<const double> col(std::size_t j) const noexcept {
    return {data_.data() + j * rows_, rows_};
  }

  std::span<double> data() noexcept { return data_; }
  std::span<const double> data() const noexcept { return data_; }

  bool all_finite() const noexcept;

  /// Copy of the nr x nc block starting at (r0, c0).
  DenseMatrix block(std::size_t r0, std::size_t c0, std::size_t nr, std::size_t nc) const;
  void set_block(std::size_t r0, std::size_t c0, const DenseMatrix& src);

  /// Copy with the strict lower triangle zeroed.
  DenseMatrix upper_triangle() const;

  friend bool operator==(const DenseMatrix&, const DenseMatrix&) = default;

 private:
  std::size_t rows_ = 0;
  std::size_t cols_ = 0;
  std::vector<double> data_;
};

DenseMatrix multiply(const DenseMatrix& a, const DenseMatrix& b);
/// aᵀ b without forming the transpose.
DenseMatrix multiply_transposed(const DenseMatrix& a, const DenseMatrix& b);
DenseMatrix transpose(const DenseMatrix& a);
DenseMatrix subtract(const DenseMatrix& a, const DenseMatrix& b);
double frobenius_norm(const DenseMatrix& a);

/// ‖a − b‖_F / ‖b‖_F, or ‖a − b‖_F when b is zero.
double relative_distance(const DenseMatrix& a, const DenseMatrix& b);

/// Seeded standard Gaussian entries, filled column by column.
DenseMatrix gaussian_matrix(std::size_t rows, std::size_t cols, std::uint64_t seed);

/// Number of doubles in a packed upper triangle of order n.
constexpr std::uint64_t packed_triangle_size(std::uint64_t n) { return n * (n + 1) / 2; }

}  // namespace gridqr
