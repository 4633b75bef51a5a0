#include "ev/matrix.hpp"

namespace ev {

namespace {

template <class S>
size_t pick_pivot(const Matrix<S>& m, size_t col, size_t start, double floor) {
  size_t best = m.rows();
  double best_abs = floor;
  for (size_t r = start; r < m.rows(); ++r) {
    double a = ScalarOps<S>::abs_approx(m(r, col));
    if (a > best_abs) {
      best_abs = a;
      best = r;
    }
  }
  return best;
}

template <class S>
void swap_rows(Matrix<S>& m, size_t a, size_t b) {
  if (a == b) return;
  for (size_t c = 0; c < m.cols(); ++c) std::swap(m(a, c), m(b, c));
}

}  // namespace

template <class S>
size_t matrix_rank(Matrix<S> m, double tol) {
  double floor = ScalarOps<S>::exact ? 0.0 : tol * std::max(1.0, m.max_abs());
  size_t rank = 0;
  for (size_t col = 0; col < m.cols() && rank < m.rows(); ++col) {
    size_t p = pick_pivot(m, col, rank, floor);
    if (p >= m.rows()) continue;
    swap_rows(m, rank, p);
    for (size_t r = rank + 1; r < m.rows(); ++r) {
      if (ScalarOps<S>::is_zero(m(r, col), 0.0)) continue;
      S f = m(r, col) / m(rank, col);
      for (size_t c = col; c < m.cols(); ++c)
        m(r, c) = m(r, c) - f * m(rank, c);
    }
    ++rank;
  }
  return rank;
}

template <class S>
S matrix_det(Matrix<S> m) {
  assert(m.rows() == m.cols());
  size_t n = m.rows();
  S det = ScalarOps<S>::one();
  for (size_t col = 0; col < n; ++col) {
    size_t p = pick_pivot(m, col, col, 0.0);
    if (p >= n) return ScalarOps<S>::zero();
    if (p != col) {
      swap_rows(m, col, p);
      det = -det;
    }
    det = det * m(col, col);
    for (size_t r = col + 1; r < n; ++r) {
      if (ScalarOps<S>::is_zero(m(r, col), 0.0)) continue;
      S f = m(r, col) / m(col, col);
      for (size_t c = col; c < n; ++c) m(r, c) = m(r, c) - f * m(col, c);
    }
  }
  return det;
}

template <class S>
Matrix<S> matrix_inverse(const Matrix<S>& m, double tol) {
  assert(m.rows() == m.cols());
  size_t n = m.rows();
  Matrix<S> a = m;
  Matrix<S> inv = Matrix<S>::identity(n);
  double floor = ScalarOps<S>::exact ? 0.0 : tol * std::max(1.0, m.max_abs());
  for (size_t col = 0; col < n; ++col) {
    size_t p = pick_pivot(a, col, col, floor);
    if (p >= n) throw InvalidInput("singular matrix");
    swap_rows(a, col, p);
    swap_rows(inv, col, p);
    S d = a(col, col);
    for (size_t c = 0; c < n; ++c) {
      a(col, c) = a(col, c) / d;
      inv(col, c) = inv(col, c) / d;
    }
    for (size_t r = 0; r < n; ++r) {
      if (r == col || ScalarOps<S>::is_zero(a(r, col), 0.0)) continue;
      S f = a(r, col);
      for (size_t c = 0; c < n; ++c) {
        a(r, c) = a(r, c) - f * a(col, c);
        inv(r, c) = inv(r, c) - f * inv(col, c);
      }
    }
  }
  return inv;
}

template size_t matrix_rank<ExactScalar>(Matrix<ExactScalar>, double);
template size_t matrix_rank<FloatScalar>(Matrix<FloatScalar>, double);
template ExactScalar matrix_det<ExactScalar>(Matrix<ExactScalar>);
template FloatScalar matrix_det<FloatScalar>(Matrix<FloatScalar>);
template Matrix<ExactScalar> matrix_inverse<ExactScalar>(
    const Matrix<ExactScalar>&, double);
template Matrix<FloatScalar> matrix_inverse<FloatScalar>(
    const Matrix<FloatScalar>&, double);

}  // namespace ev
