// Seeded sampling helpers. Every randomized check in the library threads an
// explicit seed through one of these, so reruns reproduce byte-identical
// results.

#pragma once

#include <random>

#include "ev/multipoly.hpp"
#include "ev/states.hpp"

namespace ev {

class Rng {
 public:
  explicit Rng(uint64_t seed) : eng_(seed) {}

  long int_in(long lo, long hi) {
    return std::uniform_int_distribution<long>(lo, hi)(eng_);
  }
  double gaussian() { return normal_(eng_); }

  Rational rational(long max_abs_num = 9, long max_den = 9) {
    long num = int_in(-max_abs_num, max_abs_num);
    long den = int_in(1, max_den);
    Rational q(num, den);
    q.canonicalize();
    return q;
  }
  Rational nonzero_rational(long max_abs_num = 9, long max_den = 9) {
    Rational q = rational(max_abs_num, max_den);
    while (q == 0) q = rational(max_abs_num, max_den);
    return q;
  }

  template <class S>
  S scalar() {
    if constexpr (ScalarOps<S>::exact)
      return ExactScalar(Rational(int_in(-9, 9)), Rational(int_in(-9, 9)));
    else
      return FloatScalar(gaussian(), gaussian());
  }
  template <class S>
  S nonzero_scalar() {
    S s = scalar<S>();
    while (ScalarOps<S>::is_zero(s, 1e-3)) s = scalar<S>();
    return s;
  }

  // one coefficient block per group, no group identically zero
  template <class S>
  std::vector<S> grouped_point(const Signature& sig) {
    std::vector<S> point;
    for (const auto& g : sig) {
      std::vector<S> block(g.var_count);
      bool nonzero = false;
      while (!nonzero) {
        for (auto& v : block) {
          v = scalar<S>();
          if (!ScalarOps<S>::is_zero(v, 1e-6)) nonzero = true;
        }
      }
      point.insert(point.end(), block.begin(), block.end());
    }
    return point;
  }

  // Haar-ish unitary: QR of a complex Gaussian matrix with phase fix
  Matrix<FloatScalar> unitary(size_t n);

  // random integer-entry matrix with nonzero determinant
  Matrix<ExactScalar> invertible_exact(size_t n, long entry_bound = 4);

  // signed permutation matrix over the exact scalars
  Matrix<ExactScalar> signed_permutation(size_t n);

  // mixture of g random product vectors with small integer entries
  Ensemble<ExactScalar> product_ensemble(const Dims& dims, size_t g);

  std::mt19937_64& engine() { return eng_; }

 private:
  std::mt19937_64 eng_;
  std::normal_distribution<double> normal_{0.0, 1.0};
};

}  // namespace ev
