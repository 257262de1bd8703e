#pragma once

#include <cstddef>
#include <vector>

#include "gridqr/matrix.hpp"

namespace gridqr {

struct QrOptions {
  /// Panel width for the compact-WY trailing update (I − V T Vᵀ).
  std::size_t block_size = 32;
};

/// Q·R of an m x n block, Q kept implicitly as Q = H_1 ⋯ H_n · diag(signs).
///
/// H_j = I − tau[j] v_j v_jᵀ with v_j(j) = 1 implicit and v_j(j+1:m) stored in
/// the strict lower part of column j of `reflectors`. Entries on and above the
/// diagonal of `reflectors` are not referenced. `signs` starts at +1 and is
/// flipped by sign_normalize together with the matching row of `r`.
struct HouseholderFactor {
  DenseMatrix reflectors;
  std::vector<double> tau;
  DenseMatrix r;
  std::vector<double> signs;

  std::size_t rows() const noexcept { return reflectors.rows(); }
  std::size_t cols() const noexcept { return reflectors.cols(); }
};

/// Q·R of the 2n x n stack [R1; R2] of two upper triangles.
///
/// Reflector k is e_k in the top half plus bottom(0:k, k) in the bottom half,
/// so `bottom` is itself upper triangular and the zero blocks of the stack are
/// never touched. Q = H_1 ⋯ H_n · diag(signs, 1, …, 1).
struct StackedQrFactor {
  DenseMatrix bottom;
  std::vector<double> tau;
  DenseMatrix r;
  std::vector<double> signs;

  std::size_t cols() const noexcept { return r.cols(); }
};

/// Blocked Householder QR. Requires rows >= cols >= 1 and finite entries.
/// The returned R may have negative diagonal entries; see sign_normalize.
/// A zero column gives tau = 0 and a zero diagonal entry, not an error.
HouseholderFactor householder_qr(const DenseMatrix& a, const QrOptions& options = {});

/// Structure-exploiting QR of [r1; r2]. Both must be n x n upper triangular.
StackedQrFactor stacked_qr(const DenseMatrix& r1, const DenseMatrix& r2);

/// Make diag(r) >= 0 by negating rows of R; Q absorbs the flips so Q·R is unchanged.
HouseholderFactor sign_normalize(HouseholderFactor f);
StackedQrFactor sign_normalize(StackedQrFactor f);

/// Qᵀ·c for c with f.rows() rows.
DenseMatrix apply_q_transpose(const HouseholderFactor& f, const DenseMatrix& c);
/// Q·c for c with f.rows() rows.
DenseMatrix apply_q(const HouseholderFactor& f, const DenseMatrix& c);
/// Thin m x n Q.
DenseMatrix explicit_q(const HouseholderFactor& f);

// The stacked factor acts on a pair of n-row blocks standing for [top; bottom].
void apply_q_transpose(const StackedQrFactor& f, DenseMatrix& top, DenseMatrix& bottom);
void apply_q(const StackedQrFactor& f, DenseMatrix& top, DenseMatrix& bottom);

/// Flops charged for a domanial QR of an m x n block: 2mn² − (2/3)n³.
double householder_flops(double m, double n);
/// Flops charged for one stacked-triangle merge: (2/3)n³.
double stacked_qr_flops(double n);

}  // namespace gridqr
