#include "ev/random.hpp"

#include <Eigen/Dense>

namespace ev {

Matrix<FloatScalar> Rng::unitary(size_t n) {
  Eigen::MatrixXcd g(n, n);
  for (size_t i = 0; i < n; ++i)
    for (size_t j = 0; j < n; ++j) g(i, j) = FloatScalar(gaussian(), gaussian());
  Eigen::HouseholderQR<Eigen::MatrixXcd> qr(g);
  Eigen::MatrixXcd q = qr.householderQ();
  Eigen::MatrixXcd r = qr.matrixQR().triangularView<Eigen::Upper>();
  for (size_t j = 0; j < n; ++j) {
    FloatScalar d = r(j, j);
    FloatScalar phase = std::abs(d) > 0 ? d / std::abs(d) : FloatScalar(1, 0);
    for (size_t i = 0; i < n; ++i) q(i, j) *= phase;
  }
  Matrix<FloatScalar> out(n, n);
  for (size_t i = 0; i < n; ++i)
    for (size_t j = 0; j < n; ++j) out(i, j) = q(i, j);
  return out;
}

Matrix<ExactScalar> Rng::invertible_exact(size_t n, long entry_bound) {
  while (true) {
    Matrix<ExactScalar> m(n, n);
    for (size_t i = 0; i < n; ++i)
      for (size_t j = 0; j < n; ++j)
        m(i, j) = ExactScalar(Rational(int_in(-entry_bound, entry_bound)),
                              Rational(int_in(-entry_bound, entry_bound)));
    if (!matrix_det(m).is_zero()) return m;
  }
}

Matrix<ExactScalar> Rng::signed_permutation(size_t n) {
  std::vector<size_t> perm(n);
  for (size_t i = 0; i < n; ++i) perm[i] = i;
  std::shuffle(perm.begin(), perm.end(), eng_);
  Matrix<ExactScalar> m(n, n);
  for (size_t i = 0; i < n; ++i)
    m(perm[i], i) = ExactScalar(int_in(0, 1) ? 1 : -1);
  return m;
}

Ensemble<ExactScalar> Rng::product_ensemble(const Dims& dims, size_t g) {
  Ensemble<ExactScalar> e;
  e.dims = dims;
  size_t d = dims_product(dims);
  for (size_t f = 0; f < g; ++f) {
    std::vector<std::vector<ExactScalar>> parts;
    for (int m : dims) {
      std::vector<ExactScalar> v(m);
      bool nonzero = false;
      while (!nonzero)
        for (auto& x : v) {
          x = ExactScalar(Rational(int_in(-3, 3)), Rational(int_in(-3, 3)));
          if (!x.is_zero()) nonzero = true;
        }
      parts.push_back(std::move(v));
    }
    std::vector<ExactScalar> v(d);
    for (size_t i = 0; i < d; ++i) {
      auto idx = unflatten_index(dims, i);
      ExactScalar prod(1);
      for (size_t p = 0; p < dims.size(); ++p) prod *= parts[p][idx[p]];
      v[i] = prod;
    }
    e.weights.push_back(Rational(1, static_cast<long>(g)));
    e.vectors.push_back(std::move(v));
  }
  return e;
}

}  // namespace ev
