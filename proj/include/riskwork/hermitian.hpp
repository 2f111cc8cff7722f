// Copyright 2026 The riskwork Authors
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//     http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

#pragma once

// Dense complex matrix kernel for small Hermitian problems (d <= 8 in
// practice): arithmetic, adjoints, diagonal matrix functions and a cyclic
// Jacobi eigensolver with deterministic eigenvector gauge.

#include <algorithm>
#include <cmath>
#include <complex>
#include <cstddef>
#include <numeric>
#include <span>
#include <string>
#include <vector>

#include "riskwork/config.hpp"
#include "riskwork/error.hpp"

namespace riskwork {

using Complex = std::complex<double>;
using ComplexVector = std::vector<Complex>;

/// Square complex matrix stored row-major.
class ComplexMatrix {
 public:
  ComplexMatrix() = default;

  explicit ComplexMatrix(std::size_t dim) : dim_(dim), data_(dim * dim) {
    if (dim == 0) throw Error(ErrorCode::DimensionMismatch, "matrix dimension must be >= 1");
  }

  ComplexMatrix(std::size_t dim, std::vector<Complex> entries)
      : dim_(dim), data_(std::move(entries)) {
    if (dim == 0) throw Error(ErrorCode::DimensionMismatch, "matrix dimension must be >= 1");
    if (data_.size() != dim * dim) {
      throw Error(ErrorCode::DimensionMismatch,
                  "expected " + std::to_string(dim * dim) + " entries, got " +
                      std::to_string(data_.size()));
    }
  }

  static ComplexMatrix identity(std::size_t dim) {
    ComplexMatrix m(dim);
    for (std::size_t k = 0; k < dim; ++k) m(k, k) = 1.0;
    return m;
  }

  template <typename Range>
  static ComplexMatrix diagonal(const Range& values) {
    const auto n = static_cast<std::size_t>(std::size(values));
    ComplexMatrix m(n);
    std::size_t k = 0;
    for (const auto& v : values) {
      m(k, k) = Complex(v);
      ++k;
    }
    return m;
  }

  std::size_t dim() const noexcept { return dim_; }

  Complex& operator()(std::size_t row, std::size_t col) { return data_[row * dim_ + col]; }
  const Complex& operator()(std::size_t row, std::size_t col) const {
    return data_[row * dim_ + col];
  }

  std::span<const Complex> entries() const noexcept { return data_; }

  ComplexVector column(std::size_t col) const {
    ComplexVector v(dim_);
    for (std::size_t i = 0; i < dim_; ++i) v[i] = (*this)(i, col);
    return v;
  }

  ComplexMatrix adjoint() const {
    ComplexMatrix m(dim_);
    for (std::size_t i = 0; i < dim_; ++i)
      for (std::size_t j = 0; j < dim_; ++j) m(j, i) = std::conj((*this)(i, j));
    return m;
  }

  Complex trace() const {
    Complex t = 0.0;
    for (std::size_t k = 0; k < dim_; ++k) t += (*this)(k, k);
    return t;
  }

  ComplexMatrix& operator+=(const ComplexMatrix& rhs) {
    check_same_dim(rhs);
    for (std::size_t i = 0; i < data_.size(); ++i) data_[i] += rhs.data_[i];
    return *this;
  }
  ComplexMatrix& operator-=(const ComplexMatrix& rhs) {
    check_same_dim(rhs);
    for (std::size_t i = 0; i < data_.size(); ++i) data_[i] -= rhs.data_[i];
    return *this;
  }
  ComplexMatrix& operator*=(Complex s) {
    for (auto& v : data_) v *= s;
    return *this;
  }

  friend ComplexMatrix operator+(ComplexMatrix a, const ComplexMatrix& b) { return a += b; }
  friend ComplexMatrix operator-(ComplexMatrix a, const ComplexMatrix& b) { return a -= b; }
  friend ComplexMatrix operator*(ComplexMatrix a, Complex s) { return a *= s; }
  friend ComplexMatrix operator*(Complex s, ComplexMatrix a) { return a *= s; }

  friend ComplexMatrix operator*(const ComplexMatrix& a, const ComplexMatrix& b) {
    a.check_same_dim(b);
    const std::size_t n = a.dim_;
    ComplexMatrix c(n);
    for (std::size_t i = 0; i < n; ++i)
      for (std::size_t k = 0; k < n; ++k) {
        const Complex aik = a(i, k);
        if (aik == Complex(0.0)) continue;
        for (std::size_t j = 0; j < n; ++j) c(i, j) += aik * b(k, j);
      }
    return c;
  }

  friend ComplexVector operator*(const ComplexMatrix& a, std::span<const Complex> x) {
    if (x.size() != a.dim_) throw Error(ErrorCode::DimensionMismatch, "matrix-vector size");
    ComplexVector y(a.dim_);
    for (std::size_t i = 0; i < a.dim_; ++i)
      for (std::size_t j = 0; j < a.dim_; ++j) y[i] += a(i, j) * x[j];
    return y;
  }

 private:
  void check_same_dim(const ComplexMatrix& other) const {
    if (other.dim_ != dim_) {
      throw Error(ErrorCode::DimensionMismatch,
                  "dimension " + std::to_string(dim_) + " vs " + std::to_string(other.dim_));
    }
  }

  std::size_t dim_ = 0;
  std::vector<Complex> data_;
};

/// Largest entrywise modulus of a - b.
inline double max_abs_diff(const ComplexMatrix& a, const ComplexMatrix& b) {
  if (a.dim() != b.dim()) throw Error(ErrorCode::DimensionMismatch, "max_abs_diff");
  double m = 0.0;
  auto ea = a.entries();
  auto eb = b.entries();
  for (std::size_t i = 0; i < ea.size(); ++i) m = std::max(m, std::abs(ea[i] - eb[i]));
  return m;
}

inline double hermiticity_defect(const ComplexMatrix& m) {
  double d = 0.0;
  for (std::size_t i = 0; i < m.dim(); ++i)
    for (std::size_t j = i; j < m.dim(); ++j)
      d = std::max(d, std::abs(m(i, j) - std::conj(m(j, i))));
  return d;
}

inline bool is_hermitian(const ComplexMatrix& m, const Tolerances& tol = {}) {
  return hermiticity_defect(m) <= tol.hermitian;
}

inline double unitarity_defect(const ComplexMatrix& u) {
  return max_abs_diff(u.adjoint() * u, ComplexMatrix::identity(u.dim()));
}

inline bool is_unitary(const ComplexMatrix& u, const Tolerances& tol = {}) {
  return unitarity_defect(u) <= tol.unitary;
}

inline void require_unitary(const ComplexMatrix& u, const Tolerances& tol = {}) {
  const double defect = unitarity_defect(u);
  if (!(defect <= tol.unitary)) {
    throw Error(ErrorCode::NotUnitary, "max |U^dagger U - I| = " + std::to_string(defect));
  }
}

/// diag(f(x_0), ..., f(x_{d-1})) for real x, e.g. exp(-r H) with H diagonal.
template <typename Fn>
ComplexMatrix diagonal_function(std::span<const double> x, Fn&& f) {
  ComplexMatrix m(x.size());
  for (std::size_t k = 0; k < x.size(); ++k) m(k, k) = Complex(f(x[k]));
  return m;
}

/// D * M * D' with D, D' diagonal, given by their diagonals. O(d^2).
inline ComplexMatrix scale_rows_cols(std::span<const double> left, const ComplexMatrix& m,
                                     std::span<const double> right) {
  if (left.size() != m.dim() || right.size() != m.dim())
    throw Error(ErrorCode::DimensionMismatch, "scale_rows_cols");
  ComplexMatrix out(m.dim());
  for (std::size_t i = 0; i < m.dim(); ++i)
    for (std::size_t j = 0; j < m.dim(); ++j) out(i, j) = left[i] * m(i, j) * right[j];
  return out;
}

inline Complex inner(std::span<const Complex> a, std::span<const Complex> b) {
  Complex s = 0.0;
  for (std::size_t i = 0; i < a.size(); ++i) s += std::conj(a[i]) * b[i];
  return s;
}

/// Eigenpairs of a Hermitian matrix: values descending, eigenvectors as the
/// columns of `vectors` in matching order.
struct EigenDecomposition {
  std::vector<double> values;
  ComplexMatrix vectors;

  ComplexMatrix reconstruct() const {
    ComplexMatrix d = ComplexMatrix::diagonal(values);
    return vectors * d * vectors.adjoint();
  }
};

namespace detail {

// Rotates the phase of an eigenvector so that its first non-negligible
// component is real and positive.
inline void fix_gauge(ComplexMatrix& v, std::size_t col) {
  const std::size_t n = v.dim();
  double norm = 0.0;
  for (std::size_t i = 0; i < n; ++i) norm = std::max(norm, std::abs(v(i, col)));
  for (std::size_t i = 0; i < n; ++i) {
    const double a = std::abs(v(i, col));
    if (a > 1e-8 * norm) {
      const Complex phase = std::conj(v(i, col)) / a;
      for (std::size_t k = 0; k < n; ++k) v(k, col) *= phase;
      v(i, col) = Complex(v(i, col).real(), 0.0);
      return;
    }
  }
}

// Lexicographic "greater" on columns: real parts, then imaginary parts.
inline bool column_precedes(const ComplexMatrix& v, std::size_t a, std::size_t b) {
  constexpr double eps = 1e-12;
  for (std::size_t i = 0; i < v.dim(); ++i) {
    const double ra = v(i, a).real(), rb = v(i, b).real();
    if (std::abs(ra - rb) > eps) return ra > rb;
    const double ia = v(i, a).imag(), ib = v(i, b).imag();
    if (std::abs(ia - ib) > eps) return ia > ib;
  }
  return a < b;
}

}  // namespace detail

/// Cyclic Jacobi eigensolver for Hermitian matrices.
///
/// Each rotation first removes the phase of the pivot a_pq and then applies a
/// real Givens rotation, so A <- G^dagger A G annihilates a_pq exactly. Sweeps
/// continue until the off-diagonal Frobenius norm falls below machine
/// precision relative to ||A||_F; 100 sweeps without convergence is an error.
///
/// Eigenvalues come out descending. Each eigenvector has its first
/// significant component real-positive; eigenvalues equal within 1e-12
/// (relative) are ordered lexicographically by their eigenvectors.
inline EigenDecomposition eig_hermitian(const ComplexMatrix& m, const Tolerances& tol = {}) {
  const double defect = hermiticity_defect(m);
  if (!(defect <= tol.hermitian)) {
    throw Error(ErrorCode::NotHermitian, "max |M - M^dagger| = " + std::to_string(defect));
  }
  const std::size_t n = m.dim();
  ComplexMatrix a(n);
  // Symmetrize so that rounding in the input never accumulates.
  for (std::size_t i = 0; i < n; ++i) {
    a(i, i) = m(i, i).real();
    for (std::size_t j = i + 1; j < n; ++j) {
      const Complex v = 0.5 * (m(i, j) + std::conj(m(j, i)));
      a(i, j) = v;
      a(j, i) = std::conj(v);
    }
  }
  ComplexMatrix v = ComplexMatrix::identity(n);

  auto off_norm = [&] {
    double s = 0.0;
    for (std::size_t i = 0; i < n; ++i)
      for (std::size_t j = i + 1; j < n; ++j) s += std::norm(a(i, j));
    return std::sqrt(2.0 * s);
  };
  double frob = 0.0;
  for (auto e : a.entries()) frob += std::norm(e);
  frob = std::sqrt(frob);

  constexpr int kMaxSweeps = 100;
  const double target = 1e-15 * frob;
  int sweep = 0;
  while (off_norm() > target) {
    if (++sweep > kMaxSweeps) {
      throw Error(ErrorCode::NoConvergence, "Jacobi did not converge in 100 sweeps");
    }
    for (std::size_t p = 0; p + 1 < n; ++p) {
      for (std::size_t q = p + 1; q < n; ++q) {
        const double mag = std::abs(a(p, q));
        if (mag == 0.0 || mag <= 1e-300) continue;
        const Complex phase = a(p, q) / mag;  // a_pq = mag * phase
        const double app = a(p, p).real();
        const double aqq = a(q, q).real();
        const double theta = (aqq - app) / (2.0 * mag);
        const double t = (theta >= 0.0 ? 1.0 : -1.0) /
                         (std::abs(theta) + std::sqrt(theta * theta + 1.0));
        const double c = 1.0 / std::sqrt(t * t + 1.0);
        const double s = t * c;
        // G = diag(1, conj(phase)) on (p, q) followed by [[c, s], [-s, c]].
        const Complex gpp = c, gpq = s;
        const Complex gqp = -s * std::conj(phase), gqq = c * std::conj(phase);
        for (std::size_t k = 0; k < n; ++k) {  // A <- A G, V <- V G
          const Complex akp = a(k, p), akq = a(k, q);
          a(k, p) = akp * gpp + akq * gqp;
          a(k, q) = akp * gpq + akq * gqq;
          const Complex vkp = v(k, p), vkq = v(k, q);
          v(k, p) = vkp * gpp + vkq * gqp;
          v(k, q) = vkp * gpq + vkq * gqq;
        }
        for (std::size_t k = 0; k < n; ++k) {  // A <- G^dagger A
          const Complex apk = a(p, k), aqk = a(q, k);
          a(p, k) = std::conj(gpp) * apk + std::conj(gqp) * aqk;
          a(q, k) = std::conj(gpq) * apk + std::conj(gqq) * aqk;
        }
        a(p, q) = 0.0;
        a(q, p) = 0.0;
        a(p, p) = app - t * mag;
        a(q, q) = aqq + t * mag;
      }
    }
  }

  for (std::size_t k = 0; k < n; ++k) detail::fix_gauge(v, k);

  std::vector<std::size_t> order(n);
  std::iota(order.begin(), order.end(), 0);
  std::stable_sort(order.begin(), order.end(), [&](std::size_t x, std::size_t y) {
    return a(x, x).real() > a(y, y).real();
  });
  // Degenerate blocks: lexicographic order of the gauge-fixed eigenvectors.
  const double scale = std::max(1.0, frob);
  for (std::size_t start = 0; start < n;) {
    std::size_t end = start + 1;
    while (end < n &&
           std::abs(a(order[end], order[end]).real() - a(order[start], order[start]).real()) <=
               1e-12 * scale)
      ++end;
    std::sort(order.begin() + static_cast<std::ptrdiff_t>(start),
              order.begin() + static_cast<std::ptrdiff_t>(end),
              [&](std::size_t x, std::size_t y) { return detail::column_precedes(v, x, y); });
    start = end;
  }

  EigenDecomposition out{std::vector<double>(n), ComplexMatrix(n)};
  for (std::size_t k = 0; k < n; ++k) {
    out.values[k] = a(order[k], order[k]).real();
    for (std::size_t i = 0; i < n; ++i) out.vectors(i, k) = v(i, order[k]);
  }
  return out;
}

/// Eigenvalues only, descending.
inline std::vector<double> eigenvalues_hermitian(const ComplexMatrix& m, const Tolerances& tol = {}) {
  return eig_hermitian(m, tol).values;
}

/// Assembles a unitary from orthonormal columns.
inline ComplexMatrix unitary_from_columns(std::span<const ComplexVector> columns,
                                          const Tolerances& tol = {}) {
  const std::size_t n = columns.size();
  if (n == 0) throw Error(ErrorCode::DimensionMismatch, "no columns");
  for (const auto& c : columns) {
    if (c.size() != n) throw Error(ErrorCode::DimensionMismatch, "column length != count");
  }
  for (std::size_t i = 0; i < n; ++i) {
    for (std::size_t j = i; j < n; ++j) {
      const Complex ip = inner(columns[i], columns[j]);
      const double expected = i == j ? 1.0 : 0.0;
      if (std::abs(ip - expected) > tol.unitary) {
        throw Error(ErrorCode::NotOrthonormal, "<c" + std::to_string(i) + "|c" +
                                                   std::to_string(j) + "> deviates by " +
                                                   std::to_string(std::abs(ip - expected)));
      }
    }
  }
  ComplexMatrix u(n);
  for (std::size_t j = 0; j < n; ++j)
    for (std::size_t i = 0; i < n; ++i) u(i, j) = columns[j][i];
  return u;
}

/// Kronecker product a (x) b.
inline ComplexMatrix kron(const ComplexMatrix& a, const ComplexMatrix& b) {
  const std::size_t na = a.dim(), nb = b.dim();
  ComplexMatrix out(na * nb);
  for (std::size_t i = 0; i < na; ++i)
    for (std::size_t j = 0; j < na; ++j)
      for (std::size_t k = 0; k < nb; ++k)
        for (std::size_t l = 0; l < nb; ++l) out(i * nb + k, j * nb + l) = a(i, j) * b(k, l);
  return out;
}

}  // namespace riskwork
