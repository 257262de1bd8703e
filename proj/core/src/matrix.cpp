#include "gridqr/matrix.hpp"

#include <algorithm>
#include <cmath>
#include <random>

#include "gridqr/error.hpp"

namespace gridqr {

DenseMatrix::DenseMatrix(std::size_t rows, std::size_t cols)
    : rows_(rows), cols_(cols), data_(rows * cols, 0.0) {}

DenseMatrix::DenseMatrix(std::size_t rows, std::size_t cols, std::vector<double> column_major)
    : rows_(rows), cols_(cols), data_(std::move(column_major)) {
  if (data_.size() != rows * cols) {
    throw DimensionError("matrix data length does not equal rows*cols");
  }
}

DenseMatrix DenseMatrix::identity(std::size_t rows, std::size_t cols) {
  DenseMatrix m(rows, cols);
  for (std::size_t k = 0; k < std::min(rows, cols); ++k) m(k, k) = 1.0;
  return m;
}

bool DenseMatrix::all_finite() const noexcept {
  return std::all_of(data_.begin(), data_.end(), [](double x) { return std::isfinite(x); });
}

DenseMatrix DenseMatrix::block(std::size_t r0, std::size_t c0, std::size_t nr,
                               std::size_t nc) const {
  if (r0 + nr > rows_ || c0 + nc > cols_) throw DimensionError("block out of range");
  DenseMatrix out(nr, nc);
  for (std::size_t j = 0; j < nc; ++j) {
    const double* src = data_.data() + r0 + (c0 + j) * rows_;
    std::copy(src, src + nr, out.col(j).begin());
  }
  return out;
}

void DenseMatrix::set_block(std::size_t r0, std::size_t c0, const DenseMatrix& src) {
  if (r0 + src.rows() > rows_ || c0 + src.cols() > cols_) {
    throw DimensionError("block out of range");
  }
  for (std::size_t j = 0; j < src.cols(); ++j) {
    auto s = src.col(j);
    std::copy(s.begin(), s.end(), data_.begin() + static_cast<std::ptrdiff_t>(r0 + (c0 + j) * rows_));
  }
}

DenseMatrix DenseMatrix::upper_triangle() const {
  DenseMatrix out = *this;
  for (std::size_t j = 0; j < cols_; ++j) {
    for (std::size_t i = j + 1; i < rows_; ++i) out(i, j) = 0.0;
  }
  return out;
}

DenseMatrix multiply(const DenseMatrix& a, const DenseMatrix& b) {
  if (a.cols() != b.rows()) throw DimensionError("multiply: inner dimensions differ");
  DenseMatrix c(a.rows(), b.cols());
  for (std::size_t j = 0; j < b.cols(); ++j) {
    auto cj = c.col(j);
    for (std::size_t k = 0; k < a.cols(); ++k) {
      const double bkj = b(k, j);
      if (bkj == 0.0) continue;
      auto ak = a.col(k);
      for (std::size_t i = 0; i < a.rows(); ++i) cj[i] += ak[i] * bkj;
    }
  }
  return c;
}

DenseMatrix multiply_transposed(const DenseMatrix& a, const DenseMatrix& b) {
  if (a.rows() != b.rows()) throw DimensionError("multiply_transposed: row counts differ");
  DenseMatrix c(a.cols(), b.cols());
  for (std::size_t j = 0; j < b.cols(); ++j) {
    auto bj = b.col(j);
    for (std::size_t i = 0; i < a.cols(); ++i) {
      auto ai = a.col(i);
      double s = 0.0;
      for (std::size_t k = 0; k < a.rows(); ++k) s += ai[k] * bj[k];
      c(i, j) = s;
    }
  }
  return c;
}

DenseMatrix transpose(const DenseMatrix& a) {
  DenseMatrix t(a.cols(), a.rows());
  for (std::size_t j = 0; j < a.cols(); ++j) {
    for (std::size_t i = 0; i < a.rows(); ++i) t(j, i) = a(i, j);
  }
  return t;
}

DenseMatrix subtract(const DenseMatrix& a, const DenseMatrix& b) {
  if (a.rows() != b.rows() || a.cols() != b.cols()) {
    throw DimensionError("subtract: shapes differ");
  }
  DenseMatrix c = a;
  auto cd = c.data();
  auto bd = b.data();
  for (std::size_t k = 0; k < cd.size(); ++k) cd[k] -= bd[k];
  return c;
}

double frobenius_norm(const DenseMatrix& a) {
  // Scaled sum of squares, as in LAPACK's dlassq.
  double scale = 0.0;
  double ssq = 1.0;
  for (double x : a.data()) {
    if (x == 0.0) continue;
    const double ax = std::fabs(x);
    if (scale < ax) {
      ssq = 1.0 + ssq * (scale / ax) * (scale / ax);
      scale = ax;
    } else {
      ssq += (ax / scale) * (ax / scale);
    }
  }
  return scale * std::sqrt(ssq);
}

double relative_distance(const DenseMatrix& a, const DenseMatrix& b) {
  const double diff = frobenius_norm(subtract(a, b));
  const double ref = frobenius_norm(b);
  return ref == 0.0 ? diff : diff / ref;
}

DenseMatrix gaussian_matrix(std::size_t rows, std::size_t cols, std::uint64_t seed) {
  std::mt19937_64 rng(seed);
  std::normal_distribution<double> normal(0.0, 1.0);
  DenseMatrix m(rows, cols);
  for (double& x : m.data()) x = normal(rng);
  return m;
}

}  // namespace gridqr
