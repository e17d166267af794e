#pragma once

// Small dense matrices over an arbitrary coefficient ring, with exact
// determinant and positive-semidefiniteness certificates for rationals.

#include "scalar.hpp"

#include <algorithm>
#include <cstddef>
#include <initializer_list>
#include <optional>
#include <stdexcept>
#include <utility>
#include <vector>

namespace fermicalc {

template <class T>
class Matrix {
 public:
  Matrix() = default;
  Matrix(std::size_t rows, std::size_t cols) : rows_(rows), cols_(cols), data_(rows * cols, T(0)) {}
  Matrix(std::size_t rows, std::size_t cols, const T& fill) : rows_(rows), cols_(cols), data_(rows * cols, fill) {}
  Matrix(std::initializer_list<std::initializer_list<T>> init) {
    rows_ = init.size();
    cols_ = rows_ ? init.begin()->size() : 0;
    data_.reserve(rows_ * cols_);
    for (const auto& row : init) {
      if (row.size() != cols_) throw std::invalid_argument("ragged matrix initializer");
      data_.insert(data_.end(), row.begin(), row.end());
    }
  }

  static Matrix identity(std::size_t n) {
    Matrix m(n, n);
    for (std::size_t i = 0; i < n; ++i) m(i, i) = T(1);
    return m;
  }

  std::size_t rows() const { return rows_; }
  std::size_t cols() const { return cols_; }
  bool square() const { return rows_ == cols_; }

  T& operator()(std::size_t i, std::size_t j) { return data_[i * cols_ + j]; }
  const T& operator()(std::size_t i, std::size_t j) const { return data_[i * cols_ + j]; }

  Matrix transpose() const {
    Matrix t(cols_, rows_);
    for (std::size_t i = 0; i < rows_; ++i)
      for (std::size_t j = 0; j < cols_; ++j) t(j, i) = (*this)(i, j);
    return t;
  }

  bool symmetric() const {
    if (!square()) return false;
    for (std::size_t i = 0; i < rows_; ++i)
      for (std::size_t j = i + 1; j < cols_; ++j)
        if (!((*this)(i, j) == (*this)(j, i))) return false;
    return true;
  }

  /// Rows `r` and columns `c` of this matrix, in the given order.
  Matrix submatrix(const std::vector<std::size_t>& r, const std::vector<std::size_t>& c) const {
    Matrix s(r.size(), c.size());
    for (std::size_t i = 0; i < r.size(); ++i)
      for (std::size_t j = 0; j < c.size(); ++j) s(i, j) = (*this)(r[i], c[j]);
    return s;
  }

  template <class F>
  auto map(F&& f) const -> Matrix<decltype(f(std::declval<const T&>()))> {
    Matrix<decltype(f(std::declval<const T&>()))> out(rows_, cols_);
    for (std::size_t i = 0; i < rows_; ++i)
      for (std::size_t j = 0; j < cols_; ++j) out(i, j) = f((*this)(i, j));
    return out;
  }

  friend bool operator==(const Matrix& a, const Matrix& b) {
    return a.rows_ == b.rows_ && a.cols_ == b.cols_ && a.data_ == b.data_;
  }

 private:
  std::size_t rows_ = 0;
  std::size_t cols_ = 0;
  std::vector<T> data_;
};

template <class T>
Matrix<T> operator*(const Matrix<T>& a, const Matrix<T>& b) {
  if (a.cols() != b.rows()) throw std::invalid_argument("matrix product: shape mismatch");
  Matrix<T> c(a.rows(), b.cols());
  for (std::size_t i = 0; i < a.rows(); ++i)
    for (std::size_t k = 0; k < a.cols(); ++k) {
      if (coeff_traits<T>::is_zero(a(i, k))) continue;
      for (std::size_t j = 0; j < b.cols(); ++j) c(i, j) += a(i, k) * b(k, j);
    }
  return c;
}

/// Kronecker product: (a ⊗ b)((i,k),(j,l)) = a(i,j) b(k,l), row index i*b.rows()+k.
template <class T>
Matrix<T> kronecker(const Matrix<T>& a, const Matrix<T>& b) {
  Matrix<T> out(a.rows() * b.rows(), a.cols() * b.cols());
  for (std::size_t i = 0; i < a.rows(); ++i)
    for (std::size_t j = 0; j < a.cols(); ++j)
      for (std::size_t k = 0; k < b.rows(); ++k)
        for (std::size_t l = 0; l < b.cols(); ++l) out(i * b.rows() + k, j * b.cols() + l) = a(i, j) * b(k, l);
  return out;
}

/// Determinant by Gaussian elimination. Exact rings pivot on the first nonzero
/// entry; doubles use partial pivoting.
template <ScalarType T>
T determinant(Matrix<T> a) {
  if (!a.square()) throw std::invalid_argument("determinant of non-square matrix");
  const std::size_t n = a.rows();
  T det(1);
  for (std::size_t k = 0; k < n; ++k) {
    std::size_t piv = n;
    if constexpr (coeff_traits<T>::exact) {
      for (std::size_t i = k; i < n; ++i)
        if (!coeff_traits<T>::is_zero(a(i, k))) { piv = i; break; }
    } else {
      double best = 0.0;
      for (std::size_t i = k; i < n; ++i)
        if (std::fabs(a(i, k)) > best) { best = std::fabs(a(i, k)); piv = i; }
    }
    if (piv == n) return T(0);
    if (piv != k) {
      for (std::size_t j = k; j < n; ++j) std::swap(a(k, j), a(piv, j));
      det = -det;
    }
    det *= a(k, k);
    for (std::size_t i = k + 1; i < n; ++i) {
      if (coeff_traits<T>::is_zero(a(i, k))) continue;
      T factor = a(i, k) / a(k, k);
      for (std::size_t j = k + 1; j < n; ++j) a(i, j) -= factor * a(k, j);
    }
  }
  return det;
}

/// Determinant over any commutative ring: elimination for fields, cofactor
/// expansion along the first row otherwise (meant for small matrices).
template <class T>
T generic_determinant(const Matrix<T>& a) {
  if constexpr (ScalarType<T>) {
    return determinant(a);
  } else {
    if (!a.square()) throw std::invalid_argument("determinant of non-square matrix");
    const std::size_t n = a.rows();
    if (n == 0) return T(1);
    if (n == 1) return a(0, 0);
    T det(0);
    std::vector<std::size_t> rows;
    for (std::size_t i = 1; i < n; ++i) rows.push_back(i);
    for (std::size_t j = 0; j < n; ++j) {
      if (coeff_traits<T>::is_zero(a(0, j))) continue;
      std::vector<std::size_t> cols;
      for (std::size_t k = 0; k < n; ++k)
        if (k != j) cols.push_back(k);
      T term = a(0, j) * generic_determinant(a.submatrix(rows, cols));
      if (j % 2) det -= term;
      else det += term;
    }
    return det;
  }
}

/// Outcome of an exact LDL^T positivity test.
struct PsdCertificate {
  bool psd = false;
  std::vector<Rational> pivots;     // D of the factorization, in elimination order
  std::optional<std::size_t> failed_at;  // pivot index where positivity broke
};

/// Exact PSD test by symmetric elimination without pivoting.
///
/// A symmetric matrix is PSD iff every pivot is >= 0 and a zero pivot comes with
/// a zero remaining row (the Schur complement of a PSD matrix is PSD).
inline PsdCertificate ldlt_certificate(Matrix<Rational> a) {
  if (!a.symmetric()) throw std::invalid_argument("LDL^T certificate needs a symmetric matrix");
  const std::size_t n = a.rows();
  PsdCertificate cert;
  for (std::size_t k = 0; k < n; ++k) {
    const Rational d = a(k, k);
    cert.pivots.push_back(d);
    if (sgn(d) < 0) {
      cert.failed_at = k;
      return cert;
    }
    if (sgn(d) == 0) {
      for (std::size_t j = k + 1; j < n; ++j)
        if (sgn(a(k, j)) != 0) {
          cert.failed_at = k;
          return cert;
        }
      continue;
    }
    for (std::size_t i = k + 1; i < n; ++i) {
      if (sgn(a(i, k)) == 0) continue;
      const Rational l = a(i, k) / d;
      for (std::size_t j = k + 1; j < n; ++j) a(i, j) -= l * a(k, j);
    }
  }
  cert.psd = true;
  return cert;
}

/// Coefficients c_0..c_n of det(t I - A) = sum_k c_k t^{n-k}, via Faddeev-LeVerrier.
inline std::vector<Rational> characteristic_polynomial(const Matrix<Rational>& a) {
  if (!a.square()) throw std::invalid_argument("characteristic polynomial of non-square matrix");
  const std::size_t n = a.rows();
  std::vector<Rational> c(n + 1);
  c[0] = 1;
  Matrix<Rational> m(n, n);  // M_0 = 0
  for (std::size_t k = 1; k <= n; ++k) {
    // M_k = A M_{k-1} + c_{k-1} I ;  c_k = -tr(A M_k)/k
    Matrix<Rational> next = a * m;
    for (std::size_t i = 0; i < n; ++i) next(i, i) += c[k - 1];
    Matrix<Rational> am = a * next;
    Rational tr(0);
    for (std::size_t i = 0; i < n; ++i) tr += am(i, i);
    c[k] = -tr / Rational(static_cast<long>(k));
    m = std::move(next);
  }
  return c;
}

/// Second exact PSD route: a real symmetric matrix is PSD iff the elementary
/// symmetric functions of its eigenvalues, e_k = (-1)^k c_k, are all >= 0.
inline bool psd_by_charpoly(const Matrix<Rational>& a) {
  if (!a.symmetric()) throw std::invalid_argument("PSD test needs a symmetric matrix");
  auto c = characteristic_polynomial(a);
  for (std::size_t k = 1; k < c.size(); ++k) {
    const int sign = (k % 2 == 0) ? sgn(c[k]) : -sgn(c[k]);
    if (sign < 0) return false;
  }
  return true;
}

inline std::vector<Rational> leading_principal_minors(const Matrix<Rational>& a) {
  std::vector<Rational> out;
  for (std::size_t k = 1; k <= a.rows(); ++k) {
    std::vector<std::size_t> idx(k);
    for (std::size_t i = 0; i < k; ++i) idx[i] = i;
    out.push_back(determinant(a.submatrix(idx, idx)));
  }
  return out;
}

inline Matrix<double> to_double(const Matrix<Rational>& a) {
  return a.map([](const Rational& x) { return x.get_d(); });
}

}  // namespace fermicalc
