// Small dense matrices over either scalar mode. Sizes here are desk scale
// (dimension products of a handful of qubits), so the implementations favor
// clarity and exactness over blocking tricks.

#pragma once

#include <cassert>
#include <vector>

#include "ev/scalar.hpp"

namespace ev {

template <class S>
class Matrix {
 public:
  Matrix() : rows_(0), cols_(0) {}
  Matrix(size_t rows, size_t cols)
      : rows_(rows), cols_(cols), a_(rows * cols, ScalarOps<S>::zero()) {}

  static Matrix identity(size_t n) {
    Matrix m(n, n);
    for (size_t i = 0; i < n; ++i) m(i, i) = ScalarOps<S>::one();
    return m;
  }

  size_t rows() const { return rows_; }
  size_t cols() const { return cols_; }

  S& operator()(size_t r, size_t c) {
    assert(r < rows_ && c < cols_);
    return a_[r * cols_ + c];
  }
  const S& operator()(size_t r, size_t c) const {
    assert(r < rows_ && c < cols_);
    return a_[r * cols_ + c];
  }

  friend Matrix operator+(const Matrix& a, const Matrix& b) {
    assert(a.rows_ == b.rows_ && a.cols_ == b.cols_);
    Matrix out(a.rows_, a.cols_);
    for (size_t i = 0; i < a.a_.size(); ++i) out.a_[i] = a.a_[i] + b.a_[i];
    return out;
  }
  friend Matrix operator-(const Matrix& a, const Matrix& b) {
    assert(a.rows_ == b.rows_ && a.cols_ == b.cols_);
    Matrix out(a.rows_, a.cols_);
    for (size_t i = 0; i < a.a_.size(); ++i) out.a_[i] = a.a_[i] - b.a_[i];
    return out;
  }
  friend Matrix operator*(const Matrix& a, const Matrix& b) {
    assert(a.cols_ == b.rows_);
    Matrix out(a.rows_, b.cols_);
    for (size_t i = 0; i < a.rows_; ++i)
      for (size_t k = 0; k < a.cols_; ++k) {
        const S& aik = a(i, k);
        if (ScalarOps<S>::is_zero(aik, 0.0)) continue;
        for (size_t j = 0; j < b.cols_; ++j)
          out(i, j) += aik * b(k, j);
      }
    return out;
  }
  friend Matrix operator*(const S& c, const Matrix& a) {
    Matrix out(a.rows_, a.cols_);
    for (size_t i = 0; i < a.a_.size(); ++i) out.a_[i] = c * a.a_[i];
    return out;
  }

  Matrix transpose() const {
    Matrix out(cols_, rows_);
    for (size_t i = 0; i < rows_; ++i)
      for (size_t j = 0; j < cols_; ++j) out(j, i) = (*this)(i, j);
    return out;
  }
  Matrix adjoint() const {
    Matrix out(cols_, rows_);
    for (size_t i = 0; i < rows_; ++i)
      for (size_t j = 0; j < cols_; ++j)
        out(j, i) = ScalarOps<S>::conj((*this)(i, j));
    return out;
  }

  S trace() const {
    assert(rows_ == cols_);
    S t = ScalarOps<S>::zero();
    for (size_t i = 0; i < rows_; ++i) t += (*this)(i, i);
    return t;
  }

  friend Matrix kron(const Matrix& a, const Matrix& b) {
    Matrix out(a.rows_ * b.rows_, a.cols_ * b.cols_);
    for (size_t i = 0; i < a.rows_; ++i)
      for (size_t j = 0; j < a.cols_; ++j)
        for (size_t k = 0; k < b.rows_; ++k)
          for (size_t l = 0; l < b.cols_; ++l)
            out(i * b.rows_ + k, j * b.cols_ + l) = a(i, j) * b(k, l);
    return out;
  }

  bool is_hermitian(double tol) const {
    if (rows_ != cols_) return false;
    for (size_t i = 0; i < rows_; ++i)
      for (size_t j = i; j < cols_; ++j)
        if (!ScalarOps<S>::eq((*this)(i, j),
                              ScalarOps<S>::conj((*this)(j, i)), tol))
          return false;
    return true;
  }

  double max_abs() const {
    double m = 0;
    for (const S& v : a_) m = std::max(m, ScalarOps<S>::abs_approx(v));
    return m;
  }

  bool equals(const Matrix& b, double tol) const {
    if (rows_ != b.rows_ || cols_ != b.cols_) return false;
    for (size_t i = 0; i < a_.size(); ++i)
      if (!ScalarOps<S>::eq(a_[i], b.a_[i], tol)) return false;
    return true;
  }

 private:
  size_t rows_, cols_;
  std::vector<S> a_;
};

// Rank by Gaussian elimination. Exact over the rationals; for floats the
// pivot threshold is tol * max-entry scale.
template <class S>
size_t matrix_rank(Matrix<S> m, double tol = kDefaultTol);

// Determinant of a small square matrix by elimination (field division).
template <class S>
S matrix_det(Matrix<S> m);

// Inverse; throws InvalidInput on singular input.
template <class S>
Matrix<S> matrix_inverse(const Matrix<S>& m, double tol = kDefaultTol);

extern template size_t matrix_rank<ExactScalar>(Matrix<ExactScalar>, double);
extern template size_t matrix_rank<FloatScalar>(Matrix<FloatScalar>, double);
extern template ExactScalar matrix_det<ExactScalar>(Matrix<ExactScalar>);
extern template FloatScalar matrix_det<FloatScalar>(Matrix<FloatScalar>);
extern template Matrix<ExactScalar> matrix_inverse<ExactScalar>(
    const Matrix<ExactScalar>&, double);
extern template Matrix<FloatScalar> matrix_inverse<FloatScalar>(
    const Matrix<FloatScalar>&, double);

}  // namespace ev
