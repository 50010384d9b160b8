/**
 * Copyright 2026 The DBP Authors
 *
 * Licensed under the Apache License, Version 2.0 (the "License");
 * you may not use this file except in compliance with the License.
 * You may obtain a copy of the License at
 *
 * http://www.apache.org/licenses/LICENSE-2.0
 *
 * Unless required by applicable law or agreed to in writing, software
 * distributed under the License is distributed on an "AS IS" BASIS,
 * WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
 * See the License for the specific language governing permissions and
 * limitations under the License.
 */

// Dense complex linear algebra used by every detector and precoder.
//
// All kernels accumulate in a fixed index order, so results are bitwise
// reproducible for identical inputs regardless of the calling thread.

#pragma once

#include <algorithm>
#include <cmath>
#include <complex>
#include <cstddef>
#include <initializer_list>
#include <span>
#include <string>
#include <vector>

#include "dbp/error.hpp"

namespace dbp {

using cplx = std::complex<double>;
using CVec = std::vector<cplx>;

/// Row-major dense complex matrix with value semantics.
class CMat {
 public:
  CMat() = default;
  CMat(std::size_t rows, std::size_t cols) : rows_(rows), cols_(cols), data_(rows * cols) {}
  CMat(std::size_t rows, std::size_t cols, std::vector<cplx> data)
      : rows_(rows), cols_(cols), data_(std::move(data)) {
    if (data_.size() != rows_ * cols_) {
      throw DimensionError("CMat: entry count does not match rows*cols");
    }
  }
  CMat(std::initializer_list<std::initializer_list<cplx>> rows) : rows_(rows.size()) {
    cols_ = rows_ == 0 ? 0 : rows.begin()->size();
    data_.reserve(rows_ * cols_);
    for (const auto& r : rows) {
      if (r.size() != cols_) throw DimensionError("CMat: ragged initializer");
      data_.insert(data_.end(), r.begin(), r.end());
    }
  }

  static CMat identity(std::size_t n) {
    CMat m(n, n);
    for (std::size_t i = 0; i < n; ++i) m(i, i) = 1.0;
    return m;
  }

  std::size_t rows() const noexcept { return rows_; }
  std::size_t cols() const noexcept { return cols_; }
  std::size_t size() const noexcept { return data_.size(); }

  cplx& operator()(std::size_t i, std::size_t j) noexcept { return data_[i * cols_ + j]; }
  const cplx& operator()(std::size_t i, std::size_t j) const noexcept { return data_[i * cols_ + j]; }

  std::span<cplx> row(std::size_t i) noexcept { return {data_.data() + i * cols_, cols_}; }
  std::span<const cplx> row(std::size_t i) const noexcept { return {data_.data() + i * cols_, cols_}; }

  std::span<cplx> data() noexcept { return data_; }
  std::span<const cplx> data() const noexcept { return data_; }

  friend bool operator==(const CMat&, const CMat&) = default;

 private:
  std::size_t rows_ = 0;
  std::size_t cols_ = 0;
  std::vector<cplx> data_;
};

// ---------------------------------------------------------------------------
// Vector helpers
// ---------------------------------------------------------------------------

inline void require_same_length(std::span<const cplx> a, std::span<const cplx> b, const char* what) {
  if (a.size() != b.size()) {
    throw DimensionError(std::string(what) + ": length mismatch (" + std::to_string(a.size()) +
                         " vs " + std::to_string(b.size()) + ")");
  }
}

inline CVec add(std::span<const cplx> a, std::span<const cplx> b) {
  require_same_length(a, b, "add");
  CVec out(a.size());
  for (std::size_t i = 0; i < a.size(); ++i) out[i] = a[i] + b[i];
  return out;
}

inline CVec sub(std::span<const cplx> a, std::span<const cplx> b) {
  require_same_length(a, b, "sub");
  CVec out(a.size());
  for (std::size_t i = 0; i < a.size(); ++i) out[i] = a[i] - b[i];
  return out;
}

inline CVec scale(std::span<const cplx> a, cplx alpha) {
  CVec out(a.size());
  for (std::size_t i = 0; i < a.size(); ++i) out[i] = alpha * a[i];
  return out;
}

/// y += alpha * x
inline void axpy(cplx alpha, std::span<const cplx> x, std::span<cplx> y) {
  if (x.size() != y.size()) throw DimensionError("axpy: length mismatch");
  for (std::size_t i = 0; i < x.size(); ++i) y[i] += alpha * x[i];
}

/// Inner product a^H b (conjugates the first argument).
inline cplx dot(std::span<const cplx> a, std::span<const cplx> b) {
  require_same_length(a, b, "dot");
  cplx acc = 0.0;
  for (std::size_t i = 0; i < a.size(); ++i) acc += std::conj(a[i]) * b[i];
  return acc;
}

inline double squared_norm(std::span<const cplx> a) {
  double acc = 0.0;
  for (const cplx& v : a) acc += std::norm(v);
  return acc;
}

inline double norm2(std::span<const cplx> a) { return std::sqrt(squared_norm(a)); }

/// max_i |a_i - b_i|
inline double max_abs_diff(std::span<const cplx> a, std::span<const cplx> b) {
  require_same_length(a, b, "max_abs_diff");
  double m = 0.0;
  for (std::size_t i = 0; i < a.size(); ++i) m = std::max(m, std::abs(a[i] - b[i]));
  return m;
}

inline double max_abs_diff(const CMat& a, const CMat& b) {
  if (a.rows() != b.rows() || a.cols() != b.cols()) throw DimensionError("max_abs_diff: shape mismatch");
  return max_abs_diff(a.data(), b.data());
}

/// ||a - b|| / ||b||
inline double relative_error(std::span<const cplx> a, std::span<const cplx> b) {
  return norm2(sub(a, b)) / norm2(b);
}

inline bool all_finite(std::span<const cplx> a) {
  for (const cplx& v : a) {
    if (!std::isfinite(v.real()) || !std::isfinite(v.imag())) return false;
  }
  return true;
}

// ---------------------------------------------------------------------------
// Matrix kernels
// ---------------------------------------------------------------------------

inline CMat adjoint(const CMat& a) {
  CMat out(a.cols(), a.rows());
  for (std::size_t i = 0; i < a.rows(); ++i)
    for (std::size_t j = 0; j < a.cols(); ++j) out(j, i) = std::conj(a(i, j));
  return out;
}

inline CMat transpose(const CMat& a) {
  CMat out(a.cols(), a.rows());
  for (std::size_t i = 0; i < a.rows(); ++i)
    for (std::size_t j = 0; j < a.cols(); ++j) out(j, i) = a(i, j);
  return out;
}

inline CMat matmul(const CMat& a, const CMat& b) {
  if (a.cols() != b.rows()) throw DimensionError("matmul: inner dimensions differ");
  CMat out(a.rows(), b.cols());
  for (std::size_t i = 0; i < a.rows(); ++i) {
    for (std::size_t k = 0; k < a.cols(); ++k) {
      const cplx aik = a(i, k);
      for (std::size_t j = 0; j < b.cols(); ++j) out(i, j) += aik * b(k, j);
    }
  }
  return out;
}

/// A x
inline CVec matvec(const CMat& a, std::span<const cplx> x) {
  if (a.cols() != x.size()) throw DimensionError("matvec: dimension mismatch");
  CVec out(a.rows());
  for (std::size_t i = 0; i < a.rows(); ++i) {
    cplx acc = 0.0;
    const auto r = a.row(i);
    for (std::size_t j = 0; j < r.size(); ++j) acc += r[j] * x[j];
    out[i] = acc;
  }
  return out;
}

/// A^H x, without materializing A^H.
inline CVec adjoint_matvec(const CMat& a, std::span<const cplx> x) {
  if (a.rows() != x.size()) throw DimensionError("adjoint_matvec: dimension mismatch");
  CVec out(a.cols());
  for (std::size_t i = 0; i < a.rows(); ++i) {
    const auto r = a.row(i);
    for (std::size_t j = 0; j < r.size(); ++j) out[j] += std::conj(r[j]) * x[i];
  }
  return out;
}

/// H^H H (cols x cols).
inline CMat gram(const CMat& h) {
  const std::size_t n = h.cols();
  CMat g(n, n);
  for (std::size_t k = 0; k < h.rows(); ++k) {
    const auto r = h.row(k);
    for (std::size_t i = 0; i < n; ++i) {
      const cplx ci = std::conj(r[i]);
      for (std::size_t j = 0; j < n; ++j) g(i, j) += ci * r[j];
    }
  }
  return g;
}

/// H H^H (rows x rows).
inline CMat outer_gram(const CMat& h) {
  const std::size_t n = h.rows();
  CMat g(n, n);
  for (std::size_t i = 0; i < n; ++i) {
    const auto ri = h.row(i);
    for (std::size_t j = 0; j < n; ++j) {
      const auto rj = h.row(j);
      cplx acc = 0.0;
      for (std::size_t k = 0; k < h.cols(); ++k) acc += ri[k] * std::conj(rj[k]);
      g(i, j) = acc;
    }
  }
  return g;
}

inline void add_to_diagonal(CMat& m, double value) {
  for (std::size_t i = 0; i < std::min(m.rows(), m.cols()); ++i) m(i, i) += value;
}

// ---------------------------------------------------------------------------
// Hermitian positive definite solves
// ---------------------------------------------------------------------------

/// Lower-triangular Cholesky factor L with M = L L^H.
///
/// Only the lower triangle of M is read. Throws SingularMatrixError when a
/// pivot is not strictly positive and finite.
inline CMat cholesky(const CMat& m) {
  if (m.rows() != m.cols()) throw DimensionError("cholesky: matrix is not square");
  const std::size_t n = m.rows();
  CMat l(n, n);
  for (std::size_t j = 0; j < n; ++j) {
    double d = m(j, j).real();
    for (std::size_t k = 0; k < j; ++k) d -= std::norm(l(j, k));
    if (!(d > 0.0) || !std::isfinite(d)) {
      throw SingularMatrixError("cholesky: non-positive pivot at column " + std::to_string(j));
    }
    const double ljj = std::sqrt(d);
    l(j, j) = ljj;
    for (std::size_t i = j + 1; i < n; ++i) {
      cplx acc = m(i, j);
      for (std::size_t k = 0; k < j; ++k) acc -= l(i, k) * std::conj(l(j, k));
      l(i, j) = acc / ljj;
    }
  }
  return l;
}

/// Solves L L^H x = b given the Cholesky factor L (forward then backward substitution).
inline CVec cholesky_solve(const CMat& l, std::span<const cplx> b) {
  const std::size_t n = l.rows();
  if (b.size() != n) throw DimensionError("cholesky_solve: dimension mismatch");
  CVec y(b.begin(), b.end());
  for (std::size_t i = 0; i < n; ++i) {
    cplx acc = y[i];
    for (std::size_t k = 0; k < i; ++k) acc -= l(i, k) * y[k];
    y[i] = acc / l(i, i).real();
  }
  for (std::size_t i = n; i-- > 0;) {
    cplx acc = y[i];
    for (std::size_t k = i + 1; k < n; ++k) acc -= std::conj(l(k, i)) * y[k];
    y[i] = acc / l(i, i).real();
  }
  return y;
}

inline CVec hpd_solve(const CMat& m, std::span<const cplx> b) { return cholesky_solve(cholesky(m), b); }

/// Inverse of a Hermitian positive definite matrix via Cholesky.
inline CMat hpd_inverse(const CMat& m) {
  const CMat l = cholesky(m);
  const std::size_t n = m.rows();
  CMat inv(n, n);
  CVec e(n);
  for (std::size_t j = 0; j < n; ++j) {
    std::fill(e.begin(), e.end(), cplx{0.0});
    e[j] = 1.0;
    const CVec col = cholesky_solve(l, e);
    for (std::size_t i = 0; i < n; ++i) inv(i, j) = col[i];
  }
  // Symmetrize so downstream products see an exactly Hermitian matrix.
  for (std::size_t i = 0; i < n; ++i) {
    inv(i, i) = inv(i, i).real();
    for (std::size_t j = i + 1; j < n; ++j) {
      const cplx avg = 0.5 * (inv(i, j) + std::conj(inv(j, i)));
      inv(i, j) = avg;
      inv(j, i) = std::conj(avg);
    }
  }
  return inv;
}

/// Which Gram form to regularize.
enum class GramSide {
  rows,  ///< (H H^H + rho I)^{-1}
  cols,  ///< (H^H H + rho I)^{-1}
};

inline CMat reg_inverse(const CMat& h, double rho, GramSide side) {
  if (!(rho > 0.0)) throw ParameterError("reg_inverse: rho must be positive");
  CMat g = side == GramSide::rows ? outer_gram(h) : gram(h);
  add_to_diagonal(g, rho);
  return hpd_inverse(g);
}

}  // namespace dbp
