#pragma once

// Dense linear algebra for small matrices, templated over the scalar so the
// float and exact-rational paths share one implementation.  Sizes here are
// tiny (vertices, closure classes), so plain Gauss-Jordan is the right tool.

#include <cstddef>
#include <vector>

#include "ssact/numeric.hpp"

namespace ssact {

template <typename S>
class Matrix {
 public:
  Matrix() = default;
  Matrix(std::size_t rows, std::size_t cols, S init = S(0))
      : rows_(rows), cols_(cols), data_(rows * cols, init) {}

  static Matrix identity(std::size_t n) {
    Matrix m(n, n);
    for (std::size_t i = 0; i < n; ++i) m(i, i) = S(1);
    return m;
  }

  std::size_t rows() const { return rows_; }
  std::size_t cols() const { return cols_; }

  S& operator()(std::size_t i, std::size_t j) { return data_[i * cols_ + j]; }
  const S& operator()(std::size_t i, std::size_t j) const {
    return data_[i * cols_ + j];
  }

  bool operator==(const Matrix& o) const {
    return rows_ == o.rows_ && cols_ == o.cols_ && data_ == o.data_;
  }

  Matrix operator*(const Matrix& o) const {
    Matrix r(rows_, o.cols_);
    for (std::size_t i = 0; i < rows_; ++i)
      for (std::size_t k = 0; k < cols_; ++k) {
        const S& a = (*this)(i, k);
        if (a == S(0)) continue;
        for (std::size_t j = 0; j < o.cols_; ++j) r(i, j) += a * o(k, j);
      }
    return r;
  }

  Matrix operator+(const Matrix& o) const {
    Matrix r = *this;
    for (std::size_t i = 0; i < data_.size(); ++i) r.data_[i] += o.data_[i];
    return r;
  }
  Matrix operator-(const Matrix& o) const {
    Matrix r = *this;
    for (std::size_t i = 0; i < data_.size(); ++i) r.data_[i] -= o.data_[i];
    return r;
  }

  Matrix scaled(const S& s) const {
    Matrix r = *this;
    for (auto& x : r.data_) x = x * s;
    return r;
  }

  // A * x
  std::vector<S> apply(const std::vector<S>& x) const {
    std::vector<S> y(rows_, S(0));
    for (std::size_t i = 0; i < rows_; ++i)
      for (std::size_t j = 0; j < cols_; ++j) y[i] += (*this)(i, j) * x[j];
    return y;
  }

  // x^T * A
  std::vector<S> apply_left(const std::vector<S>& x) const {
    std::vector<S> y(cols_, S(0));
    for (std::size_t i = 0; i < rows_; ++i) {
      if (x[i] == S(0)) continue;
      for (std::size_t j = 0; j < cols_; ++j) y[j] += x[i] * (*this)(i, j);
    }
    return y;
  }

  Matrix transpose() const {
    Matrix r(cols_, rows_);
    for (std::size_t i = 0; i < rows_; ++i)
      for (std::size_t j = 0; j < cols_; ++j) r(j, i) = (*this)(i, j);
    return r;
  }

  template <typename T>
  Matrix<T> cast() const {
    Matrix<T> r(rows_, cols_);
    for (std::size_t i = 0; i < rows_; ++i)
      for (std::size_t j = 0; j < cols_; ++j) r(i, j) = T((*this)(i, j));
    return r;
  }

 private:
  std::size_t rows_ = 0, cols_ = 0;
  std::vector<S> data_;
};

using IntMatrix = Matrix<long long>;

template <typename S>
Matrix<S> matrix_from_int(const IntMatrix& a) {
  Matrix<S> r(a.rows(), a.cols());
  for (std::size_t i = 0; i < a.rows(); ++i)
    for (std::size_t j = 0; j < a.cols(); ++j) r(i, j) = S(a(i, j));
  return r;
}

template <typename S>
S vec_sum(const std::vector<S>& v) {
  S s(0);
  for (const auto& x : v) s += x;
  return s;
}

template <typename S>
S vec_one_norm(const std::vector<S>& v) {
  S s(0);
  for (const auto& x : v) s += sabs(x);
  return s;
}

template <typename S>
S vec_inf_norm(const std::vector<S>& v) {
  S s(0);
  for (const auto& x : v) {
    S a = sabs(x);
    if (a > s) s = a;
  }
  return s;
}

template <typename S>
S dot(const std::vector<S>& a, const std::vector<S>& b) {
  S s(0);
  for (std::size_t i = 0; i < a.size(); ++i) s += a[i] * b[i];
  return s;
}

// Gauss-Jordan inverse with partial pivoting.  Throws ComputeError on a
// singular matrix (exact zero pivot; fine at these sizes).
template <typename S>
Matrix<S> lu_inverse(const Matrix<S>& a) {
  const std::size_t n = a.rows();
  if (a.cols() != n) throw InternalError("lu_inverse: matrix not square");
  Matrix<S> m = a;
  Matrix<S> inv = Matrix<S>::identity(n);
  for (std::size_t col = 0; col < n; ++col) {
    std::size_t piv = col;
    S best = sabs(m(col, col));
    for (std::size_t r = col + 1; r < n; ++r) {
      S v = sabs(m(r, col));
      if (v > best) {
        best = v;
        piv = r;
      }
    }
    if (best == S(0)) throw ComputeError("singular matrix");
    if (piv != col) {
      for (std::size_t j = 0; j < n; ++j) {
        std::swap(m(piv, j), m(col, j));
        std::swap(inv(piv, j), inv(col, j));
      }
    }
    S p = m(col, col);
    for (std::size_t j = 0; j < n; ++j) {
      m(col, j) = m(col, j) / p;
      inv(col, j) = inv(col, j) / p;
    }
    for (std::size_t r = 0; r < n; ++r) {
      if (r == col) continue;
      S f = m(r, col);
      if (f == S(0)) continue;
      for (std::size_t j = 0; j < n; ++j) {
        m(r, j) -= f * m(col, j);
        inv(r, j) -= f * inv(col, j);
      }
    }
  }
  return inv;
}

template <typename S>
std::vector<S> lu_solve(const Matrix<S>& a, const std::vector<S>& b) {
  return lu_inverse(a).apply(b);
}

// Basis of the kernel of a rational matrix, via reduced row echelon form.
inline std::vector<std::vector<Rational>> nullspace(Matrix<Rational> m) {
  const std::size_t rows = m.rows(), cols = m.cols();
  std::vector<long> pivot_of_col(cols, -1);
  std::size_t rank = 0;
  for (std::size_t col = 0; col < cols && rank < rows; ++col) {
    std::size_t piv = rank;
    while (piv < rows && m(piv, col) == 0) ++piv;
    if (piv == rows) continue;
    if (piv != rank)
      for (std::size_t j = 0; j < cols; ++j) std::swap(m(piv, j), m(rank, j));
    Rational p = m(rank, col);
    for (std::size_t j = 0; j < cols; ++j) m(rank, j) /= p;
    for (std::size_t r = 0; r < rows; ++r) {
      if (r == rank) continue;
      Rational f = m(r, col);
      if (f == 0) continue;
      for (std::size_t j = 0; j < cols; ++j) m(r, j) -= f * m(rank, j);
    }
    pivot_of_col[col] = static_cast<long>(rank);
    ++rank;
  }
  std::vector<std::vector<Rational>> basis;
  for (std::size_t free_col = 0; free_col < cols; ++free_col) {
    if (pivot_of_col[free_col] >= 0) continue;
    std::vector<Rational> v(cols, Rational(0));
    v[free_col] = 1;
    for (std::size_t col = 0; col < cols; ++col) {
      long pr = pivot_of_col[col];
      if (pr >= 0) v[col] = -m(static_cast<std::size_t>(pr), free_col);
    }
    basis.push_back(std::move(v));
  }
  return basis;
}

}  // namespace ssact
