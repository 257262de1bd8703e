#include "gridqr/householder.hpp"

#include <algorithm>
#include <cmath>
#include <string>

#include "gridqr/error.hpp"

namespace gridqr {
namespace {

struct Reflector {
  double beta;
  double tau;
  double scale;  // v(1:) = x * scale
};

// dlarfg without the underflow rescaling loop; hypot covers the overflow side.
Reflector make_reflector(double alpha, double xnorm) {
  if (xnorm == 0.0) return {alpha, 0.0, 0.0};
  const double beta = -std::copysign(std::hypot(alpha, xnorm), alpha);
  return {beta, (beta - alpha) / beta, 1.0 / (alpha - beta)};
}

double norm2(const double* x, std::size_t len) {
  double scale = 0.0;
  double ssq = 1.0;
  for (std::size_t k = 0; k < len; ++k) {
    if (x[k] == 0.0) continue;
    const double ax = std::fabs(x[k]);
    if (scale < ax) {
      ssq = 1.0 + ssq * (scale / ax) * (scale / ax);
      scale = ax;
    } else {
      ssq += (ax / scale) * (ax / scale);
    }
  }
  return scale * std::sqrt(ssq);
}

// Apply H = I − tau v vᵀ to columns [c0, c1) of w, where v lives in column j
// of `v` (v(j) = 1, v(j+1:m) stored below the diagonal).
void apply_reflector(const DenseMatrix& v, std::size_t j, double tau, DenseMatrix& w,
                     std::size_t c0, std::size_t c1) {
  if (tau == 0.0) return;
  const std::size_t m = v.rows();
  const double* vj = v.col(j).data();
  for (std::size_t c = c0; c < c1; ++c) {
    double* wc = w.col(c).data();
    double s = wc[j];
    for (std::size_t l = j + 1; l < m; ++l) s += vj[l] * wc[l];
    s *= tau;
    wc[j] -= s;
    for (std::size_t l = j + 1; l < m; ++l) wc[l] -= vj[l] * s;
  }
}

void check_qr_input(const DenseMatrix& a) {
  if (a.cols() == 0 || a.rows() < a.cols()) {
    throw DimensionError("householder_qr needs rows >= cols >= 1, got " +
                         std::to_string(a.rows()) + "x" + std::to_string(a.cols()));
  }
  if (!a.all_finite()) throw NonFiniteError("householder_qr: input has non-finite entries");
}

// Trailing update C ← (I − V T Vᵀ)ᵀ C for the panel holding columns
// [k0, k0+kb) of w, with C = w(k0:m, k0+kb:n).
void apply_block_reflector_transpose(DenseMatrix& w, const std::vector<double>& tau,
                                     std::size_t k0, std::size_t kb) {
  const std::size_t m = w.rows();
  const std::size_t n = w.cols();
  const std::size_t c0 = k0 + kb;
  const std::size_t nc = n - c0;

  // T is kb x kb upper triangular, built column by column (dlarft, forward).
  DenseMatrix t(kb, kb);
  for (std::size_t i = 0; i < kb; ++i) {
    const double ti = tau[k0 + i];
    t(i, i) = ti;
    if (ti == 0.0 || i == 0) continue;
    const std::size_t gi = k0 + i;
    const double* vi = w.col(gi).data();
    std::vector<double> z(i);
    for (std::size_t q = 0; q < i; ++q) {
      const double* vq = w.col(k0 + q).data();
      double s = vq[gi];  // v_i(gi) = 1
      for (std::size_t l = gi + 1; l < m; ++l) s += vq[l] * vi[l];
      z[q] = -ti * s;
    }
    for (std::size_t r = 0; r < i; ++r) {
      double s = 0.0;
      for (std::size_t q = r; q < i; ++q) s += t(r, q) * z[q];
      t(r, i) = s;
    }
  }

  // Y = Vᵀ C
  DenseMatrix y(kb, nc);
  for (std::size_t c = 0; c < nc; ++c) {
    const double* cc = w.col(c0 + c).data();
    for (std::size_t q = 0; q < kb; ++q) {
      const std::size_t gq = k0 + q;
      const double* vq = w.col(gq).data();
      double s = cc[gq];
      for (std::size_t l = gq + 1; l < m; ++l) s += vq[l] * cc[l];
      y(q, c) = s;
    }
  }
  // Y ← Tᵀ Y, bottom row first so each row reads untouched inputs.
  for (std::size_t c = 0; c < nc; ++c) {
    for (std::size_t q = kb; q-- > 0;) {
      double s = 0.0;
      for (std::size_t r = 0; r <= q; ++r) s += t(r, q) * y(r, c);
      y(q, c) = s;
    }
  }
  // C ← C − V Y
  for (std::size_t c = 0; c < nc; ++c) {
    double* cc = w.col(c0 + c).data();
    for (std::size_t q = 0; q < kb; ++q) {
      const double yq = y(q, c);
      if (yq == 0.0) continue;
      const std::size_t gq = k0 + q;
      const double* vq = w.col(gq).data();
      cc[gq] -= yq;
      for (std::size_t l = gq + 1; l < m; ++l) cc[l] -= vq[l] * yq;
    }
  }
}

template <class Factor>
Factor normalize_signs(Factor f) {
  const std::size_t n = f.r.cols();
  for (std::size_t j = 0; j < n; ++j) {
    if (!(f.r(j, j) < 0.0)) continue;
    for (std::size_t c = j; c < n; ++c) f.r(j, c) = -f.r(j, c);
    f.signs[j] = -f.signs[j];
  }
  return f;
}

}  // namespace

HouseholderFactor householder_qr(const DenseMatrix& a, const QrOptions& options) {
  check_qr_input(a);
  const std::size_t m = a.rows();
  const std::size_t n = a.cols();
  const std::size_t nb = std::max<std::size_t>(1, options.block_size);

  DenseMatrix w = a;
  std::vector<double> tau(n, 0.0);

  for (std::size_t k0 = 0; k0 < n; k0 += nb) {
    const std::size_t kb = std::min(nb, n - k0);
    for (std::size_t j = k0; j < k0 + kb; ++j) {
      double* wj = w.col(j).data();
      const Reflector h = make_reflector(wj[j], norm2(wj + j + 1, m - j - 1));
      for (std::size_t l = j + 1; l < m; ++l) wj[l] *= h.scale;
      wj[j] = h.beta;
      tau[j] = h.tau;
      apply_reflector(w, j, h.tau, w, j + 1, k0 + kb);
    }
    if (k0 + kb < n) apply_block_reflector_transpose(w, tau, k0, kb);
  }

  HouseholderFactor f;
  f.r = w.block(0, 0, n, n).upper_triangle();
  f.reflectors = std::move(w);
  f.tau = std::move(tau);
  f.signs.assign(n, 1.0);
  return f;
}

StackedQrFactor stacked_qr(const DenseMatrix& r1, const DenseMatrix& r2) {
  const std::size_t n = r1.cols();
  if (n == 0 || r1.rows() != n || r2.rows() != n || r2.cols() != n) {
    throw DimensionError("stacked_qr needs two n x n triangles of the same order");
  }
  if (!r1.all_finite() || !r2.all_finite()) {
    throw NonFiniteError("stacked_qr: input has non-finite entries");
  }

  DenseMatrix top = r1.upper_triangle();
  DenseMatrix bot = r2.upper_triangle();
  std::vector<double> tau(n, 0.0);

  for (std::size_t k = 0; k < n; ++k) {
    double* vk = bot.col(k).data();
    const Reflector h = make_reflector(top(k, k), norm2(vk, k + 1));
    for (std::size_t i = 0; i <= k; ++i) vk[i] *= h.scale;
    top(k, k) = h.beta;
    tau[k] = h.tau;
    if (h.tau == 0.0) continue;
    for (std::size_t j = k + 1; j < n; ++j) {
      double* bj = bot.col(j).data();
      double s = top(k, j);
      for (std::size_t i = 0; i <= k; ++i) s += vk[i] * bj[i];
      s *= h.tau;
      top(k, j) -= s;
      for (std::size_t i = 0; i <= k; ++i) bj[i] -= vk[i] * s;
    }
  }

  StackedQrFactor f;
  f.r = std::move(top);
  f.bottom = std::move(bot);
  f.tau = std::move(tau);
  f.signs.assign(n, 1.0);
  return f;
}

HouseholderFactor sign_normalize(HouseholderFactor f) { return normalize_signs(std::move(f)); }
StackedQrFactor sign_normalize(StackedQrFactor f) { return normalize_signs(std::move(f)); }

DenseMatrix apply_q_transpose(const HouseholderFactor& f, const DenseMatrix& c) {
  if (c.rows() != f.rows()) throw DimensionError("apply_q_transpose: row count mismatch");
  DenseMatrix out = c;
  const std::size_t n = f.cols();
  for (std::size_t j = 0; j < n; ++j) apply_reflector(f.reflectors, j, f.tau[j], out, 0, out.cols());
  for (std::size_t j = 0; j < n; ++j) {
    if (f.signs[j] > 0.0) continue;
    for (std::size_t c2 = 0; c2 < out.cols(); ++c2) out(j, c2) = -out(j, c2);
  }
  return out;
}

DenseMatrix apply_q(const HouseholderFactor& f, const DenseMatrix& c) {
  if (c.rows() != f.rows()) throw DimensionError("apply_q: row count mismatch");
  DenseMatrix out = c;
  const std::size_t n = f.cols();
  for (std::size_t j = 0; j < n; ++j) {
    if (f.signs[j] > 0.0) continue;
    for (std::size_t c2 = 0; c2 < out.cols(); ++c2) out(j, c2) = -out(j, c2);
  }
  for (std::size_t j = n; j-- > 0;) apply_reflector(f.reflectors, j, f.tau[j], out, 0, out.cols());
  return out;
}

DenseMatrix explicit_q(const HouseholderFactor& f) {
  return apply_q(f, DenseMatrix::identity(f.rows(), f.cols()));
}

namespace {

void check_stacked_operands(const StackedQrFactor& f, const DenseMatrix& top,
                            const DenseMatrix& bottom) {
  const std::size_t n = f.cols();
  if (top.rows() != n || bottom.rows() != n || top.cols() != bottom.cols()) {
    throw DimensionError("stacked apply: blocks must both have n rows and equal widths");
  }
}

void apply_stacked_reflector(const StackedQrFactor& f, std::size_t k, DenseMatrix& top,
                             DenseMatrix& bottom) {
  const double tk = f.tau[k];
  if (tk == 0.0) return;
  const double* vk = f.bottom.col(k).data();
  for (std::size_t c = 0; c < top.cols(); ++c) {
    double* bc = bottom.col(c).data();
    double s = top(k, c);
    for (std::size_t i = 0; i <= k; ++i) s += vk[i] * bc[i];
    s *= tk;
    top(k, c) -= s;
    for (std::size_t i = 0; i <= k; ++i) bc[i] -= vk[i] * s;
  }
}

void flip_rows(const std::vector<double>& signs, DenseMatrix& top) {
  for (std::size_t j = 0; j < signs.size(); ++j) {
    if (signs[j] > 0.0) continue;
    for (std::size_t c = 0; c < top.cols(); ++c) top(j, c) = -top(j, c);
  }
}

}  // namespace

void apply_q_transpose(const StackedQrFactor& f, DenseMatrix& top, DenseMatrix& bottom) {
  check_stacked_operands(f, top, bottom);
  for (std::size_t k = 0; k < f.cols(); ++k) apply_stacked_reflector(f, k, top, bottom);
  flip_rows(f.signs, top);
}

void apply_q(const StackedQrFactor& f, DenseMatrix& top, DenseMatrix& bottom) {
  check_stacked_operands(f, top, bottom);
  flip_rows(f.signs, top);
  for (std::size_t k = f.cols(); k-- > 0;) apply_stacked_reflector(f, k, top, bottom);
}

double householder_flops(double m, double n) { return 2.0 * m * n * n - (2.0 / 3.0) * n * n * n; }

double stacked_qr_flops(double n) { return (2.0 / 3.0) * n * n * n; }

}  // namespace gridqr
