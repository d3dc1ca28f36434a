#pragma once

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <numeric>
#include <ostream>
#include <vector>

#include "getzler/scalar.hpp"

namespace getzler {

/// Small dense row-major matrix over any commutative coefficient ring T.
/// T must be constructible from an int (0 and 1 are used as ring units).
template <typename T>
class Matrix {
 public:
  Matrix() = default;
  Matrix(std::size_t rows, std::size_t cols) : rows_(rows), cols_(cols), data_(rows * cols, T(0)) {}
  Matrix(std::size_t rows, std::size_t cols, std::vector<T> data)
      : rows_(rows), cols_(cols), data_(std::move(data)) {
    if (data_.size() != rows_ * cols_) throw InputError("Matrix: data size does not match shape");
  }

  static Matrix identity(std::size_t k) {
    Matrix m(k, k);
    for (std::size_t i = 0; i < k; ++i) m(i, i) = T(1);
    return m;
  }
  static Matrix scalar(std::size_t k, const T& s) {
    Matrix m(k, k);
    for (std::size_t i = 0; i < k; ++i) m(i, i) = s;
    return m;
  }

  std::size_t rows() const { return rows_; }
  std::size_t cols() const { return cols_; }
  bool square() const { return rows_ == cols_; }

  T& operator()(std::size_t i, std::size_t j) { return data_[i * cols_ + j]; }
  const T& operator()(std::size_t i, std::size_t j) const { return data_[i * cols_ + j]; }
  const std::vector<T>& data() const { return data_; }

  bool is_zero() const {
    for (const auto& v : data_)
      if (!(v == T(0))) return false;
    return true;
  }

  Matrix& operator+=(const Matrix& o) {
    check_same_shape(o);
    for (std::size_t k = 0; k < data_.size(); ++k) data_[k] = data_[k] + o.data_[k];
    return *this;
  }
  Matrix& operator-=(const Matrix& o) {
    check_same_shape(o);
    for (std::size_t k = 0; k < data_.size(); ++k) data_[k] = data_[k] - o.data_[k];
    return *this;
  }
  Matrix& operator*=(const T& s) {
    for (auto& v : data_) v = v * s;
    return *this;
  }

  friend Matrix operator+(Matrix a, const Matrix& b) { return a += b; }
  friend Matrix operator-(Matrix a, const Matrix& b) { return a -= b; }
  friend Matrix operator-(Matrix a) {
    for (auto& v : a.data_) v = -v;
    return a;
  }
  friend Matrix operator*(Matrix a, const T& s) { return a *= s; }
  friend Matrix operator*(const T& s, Matrix a) {
    for (auto& v : a.data_) v = s * v;
    return a;
  }
  friend Matrix operator*(const Matrix& a, const Matrix& b) {
    if (a.cols_ != b.rows_) throw InputError("Matrix: inner dimensions differ");
    Matrix c(a.rows_, b.cols_);
    for (std::size_t i = 0; i < a.rows_; ++i)
      for (std::size_t k = 0; k < a.cols_; ++k) {
        const T& aik = a(i, k);
        if (aik == T(0)) continue;
        for (std::size_t j = 0; j < b.cols_; ++j) c(i, j) = c(i, j) + aik * b(k, j);
      }
    return c;
  }
  friend bool operator==(const Matrix& a, const Matrix& b) {
    return a.rows_ == b.rows_ && a.cols_ == b.cols_ && a.data_ == b.data_;
  }

  T trace() const {
    if (!square()) throw InputError("Matrix: trace of non-square matrix");
    T s(0);
    for (std::size_t i = 0; i < rows_; ++i) s = s + (*this)(i, i);
    return s;
  }

  Matrix transpose() const {
    Matrix t(cols_, rows_);
    for (std::size_t i = 0; i < rows_; ++i)
      for (std::size_t j = 0; j < cols_; ++j) t(j, i) = (*this)(i, j);
    return t;
  }

  template <typename F>
  auto map(F&& f) const -> Matrix<decltype(f(std::declval<T>()))> {
    using U = decltype(f(std::declval<T>()));
    std::vector<U> out;
    out.reserve(data_.size());
    for (const auto& v : data_) out.push_back(f(v));
    return Matrix<U>(rows_, cols_, std::move(out));
  }

  friend std::ostream& operator<<(std::ostream& os, const Matrix& m) {
    os << '[';
    for (std::size_t i = 0; i < m.rows_; ++i) {
      os << (i ? "; " : "");
      for (std::size_t j = 0; j < m.cols_; ++j) os << (j ? " " : "") << m(i, j);
    }
    return os << ']';
  }

 private:
  void check_same_shape(const Matrix& o) const {
    if (rows_ != o.rows_ || cols_ != o.cols_) throw InputError("Matrix: shape mismatch");
  }

  std::size_t rows_ = 0;
  std::size_t cols_ = 0;
  std::vector<T> data_;
};

/// Kronecker product a ⊗ b.
template <typename T>
Matrix<T> kron(const Matrix<T>& a, const Matrix<T>& b) {
  Matrix<T> c(a.rows() * b.rows(), a.cols() * b.cols());
  for (std::size_t i = 0; i < a.rows(); ++i)
    for (std::size_t j = 0; j < a.cols(); ++j)
      for (std::size_t k = 0; k < b.rows(); ++k)
        for (std::size_t l = 0; l < b.cols(); ++l) c(i * b.rows() + k, j * b.cols() + l) = a(i, j) * b(k, l);
  return c;
}

/// Determinant by permutation expansion; valid over any commutative ring (used for nilpotent
/// coefficient rings where no division is available). Intended for sizes up to about 8.
template <typename T>
T det_expansion(const Matrix<T>& m) {
  if (!m.square()) throw InputError("det: non-square matrix");
  const std::size_t k = m.rows();
  std::vector<std::size_t> perm(k);
  std::iota(perm.begin(), perm.end(), 0);
  T total(0);
  do {
    int inversions = 0;
    for (std::size_t i = 0; i < k; ++i)
      for (std::size_t j = i + 1; j < k; ++j)
        if (perm[i] > perm[j]) ++inversions;
    T prod(1);
    for (std::size_t i = 0; i < k && !(prod == T(0)); ++i) prod = prod * m(i, perm[i]);
    total = (inversions % 2) ? total - prod : total + prod;
  } while (std::next_permutation(perm.begin(), perm.end()));
  return total;
}

namespace detail {
inline double pivot_weight(const Complex& z) { return std::abs(z); }
inline double pivot_weight(const ComplexRational& z) { return z.is_zero() ? 0.0 : 1.0; }
}  // namespace detail

/// Inverse over a field (Gauss-Jordan with partial pivoting by magnitude).
template <typename T>
Matrix<T> inverse(const Matrix<T>& m) {
  if (!m.square()) throw InputError("inverse: non-square matrix");
  const std::size_t k = m.rows();
  Matrix<T> a = m;
  Matrix<T> inv = Matrix<T>::identity(k);
  for (std::size_t col = 0; col < k; ++col) {
    std::size_t best = col;
    double best_w = detail::pivot_weight(a(col, col));
    for (std::size_t r = col + 1; r < k; ++r) {
      double w = detail::pivot_weight(a(r, col));
      if (w > best_w) {
        best = r;
        best_w = w;
      }
    }
    if (best_w == 0.0) throw std::domain_error("inverse: singular matrix");
    if (best != col)
      for (std::size_t j = 0; j < k; ++j) {
        std::swap(a(col, j), a(best, j));
        std::swap(inv(col, j), inv(best, j));
      }
    T piv = a(col, col);
    for (std::size_t j = 0; j < k; ++j) {
      a(col, j) = a(col, j) / piv;
      inv(col, j) = inv(col, j) / piv;
    }
    for (std::size_t r = 0; r < k; ++r) {
      if (r == col) continue;
      T f = a(r, col);
      if (f == T(0)) continue;
      for (std::size_t j = 0; j < k; ++j) {
        a(r, j) = a(r, j) - f * a(col, j);
        inv(r, j) = inv(r, j) - f * inv(col, j);
      }
    }
  }
  return inv;
}

/// Determinant over a field by elimination.
template <typename T>
T determinant(Matrix<T> a) {
  if (!a.square()) throw InputError("det: non-square matrix");
  const std::size_t k = a.rows();
  T det(1);
  for (std::size_t col = 0; col < k; ++col) {
    std::size_t best = col;
    double best_w = detail::pivot_weight(a(col, col));
    for (std::size_t r = col + 1; r < k; ++r)
      if (double w = detail::pivot_weight(a(r, col)); w > best_w) {
        best = r;
        best_w = w;
      }
    if (best_w == 0.0) return T(0);
    if (best != col) {
      for (std::size_t j = 0; j < k; ++j) std::swap(a(col, j), a(best, j));
      det = -det;
    }
    det = det * a(col, col);
    for (std::size_t r = col + 1; r < k; ++r) {
      T f = a(r, col) / a(col, col);
      if (f == T(0)) continue;
      for (std::size_t j = col; j < k; ++j) a(r, j) = a(r, j) - f * a(col, j);
    }
  }
  return det;
}

/// Entrywise max-abs distance between numeric matrices.
inline double max_abs_diff(const Matrix<Complex>& a, const Matrix<Complex>& b) {
  if (a.rows() != b.rows() || a.cols() != b.cols()) throw InputError("max_abs_diff: shape mismatch");
  double d = 0.0;
  for (std::size_t k = 0; k < a.data().size(); ++k) d = std::max(d, std::abs(a.data()[k] - b.data()[k]));
  return d;
}

/// Max row-sum norm; bounds the spectral radius.
inline double norm_inf(const Matrix<Complex>& a) {
  double best = 0.0;
  for (std::size_t i = 0; i < a.rows(); ++i) {
    double s = 0.0;
    for (std::size_t j = 0; j < a.cols(); ++j) s += std::abs(a(i, j));
    best = std::max(best, s);
  }
  return best;
}

template <typename S>
Matrix<Complex> to_numeric(const Matrix<S>& m) {
  return m.map([](const S& v) { return ScalarTraits<S>::to_complex(v); });
}

}  // namespace getzler
