// Factor-structure analysis for the variety polynomials: rank-1 coefficient
// tensor splitting across variable groups, linear-factor extraction inside a
// group, and numeric deflation fallbacks with certified residuals.

#pragma once

#include <optional>
#include <variant>

#include "ev/multipoly.hpp"

namespace ev {

template <class S>
struct LinearForm {
  int group = 0;
  std::vector<S> coeffs;  // length d_g, not all zero

  MultiPoly<S> to_poly(const Signature& sig) const;
  // first nonzero coefficient scaled to 1
  LinearForm normalized() const;
  std::string to_string() const;
};

// Certificate that a coefficient tensor is not rank one: a 2x2 minor through
// the pivot with nonzero determinant.
template <class S>
struct TensorMinorCertificate {
  int group = 0;
  ExpVec pivot, row_exp, col_exp;  // full exponent vectors of the four corners
  S minor_value{};
};

template <class S>
struct GroupFactorization {
  S constant{};
  std::vector<MultiPoly<S>> per_group;  // one factor per group, group order
};

template <class S>
using GroupSeparableResult =
    std::variant<GroupFactorization<S>, TensorMinorCertificate<S>>;

// Splits p = c * prod_g f_g when the coefficient tensor indexed by per-group
// monomials has rank one; otherwise returns a verifiable 2x2 minor witness.
template <class S>
GroupSeparableResult<S> group_separable_factor(const MultiPoly<S>& p,
                                               double tol = kDefaultTol);

template <class S>
struct BinaryFactorization {
  std::vector<LinearForm<S>> forms;  // deg f entries, repeats for multiplicity
  S constant{};
  bool numeric = false;  // roots obtained by float fallback
};

// Factor a binary form (single 2-variable group) into linear forms over C.
// Exact mode resolves monomial content, rational roots and quadratic
// radicals exactly and falls back to certified float roots beyond that.
template <class S>
std::optional<BinaryFactorization<S>> binary_linear_factors(
    const MultiPoly<S>& f, int group_id, double tol = kDefaultTol);

enum class LinearFormsOutcome { ProductOfLinearForms, Not, Undecided };

template <class S>
struct LinearFormsResult {
  LinearFormsOutcome outcome = LinearFormsOutcome::Undecided;
  std::vector<LinearForm<S>> forms;
  std::string note;
};

// Tangent-hyperplane deflation for one group with d_g > 2: find a root on a
// random line section, peel the gradient hyperplane, recurse. Decisions are
// numeric with residual gates (accept below tol * scale, reject above
// sqrt(tol) * scale, undecided between).
template <class S>
LinearFormsResult<S> linear_forms_test(const MultiPoly<S>& f, int group_id,
                                       uint64_t seed, double tol = kDefaultTol);

template <class S>
struct BilinearFactor {
  MultiPoly<S> poly;          // normalized (1,1) factor
  Matrix<S> coeff_matrix;     // 2x2, row = first group variable index
  S det{};
};

// Numeric deflation of a bidegree (d,d) form over two 2-variable groups into
// d bilinear factors; used when no structural factorization is available.
// Serves the float pipeline; the exact instantiation reports no result.
template <class S>
std::optional<std::vector<BilinearFactor<S>>> bilinear_factors_numeric(
    const MultiPoly<S>& f, uint64_t seed, double tol = kDefaultTol);
template <>
std::optional<std::vector<BilinearFactor<ExactScalar>>>
bilinear_factors_numeric(const MultiPoly<ExactScalar>&, uint64_t, double);
template <>
std::optional<std::vector<BilinearFactor<FloatScalar>>>
bilinear_factors_numeric(const MultiPoly<FloatScalar>&, uint64_t, double);

// Coefficient matrix of a (1,1) form over two 2-variable groups.
template <class S>
Matrix<S> bilinear_coeff_matrix(const MultiPoly<S>& f);

#define EV_EXTERN_POLYFACTOR(S)                                             \
  extern template struct LinearForm<S>;                                     \
  extern template GroupSeparableResult<S> group_separable_factor(           \
      const MultiPoly<S>&, double);                                         \
  extern template std::optional<BinaryFactorization<S>>                     \
  binary_linear_factors(const MultiPoly<S>&, int, double);                  \
  extern template LinearFormsResult<S> linear_forms_test(const MultiPoly<S>&, \
                                                         int, uint64_t,     \
                                                         double);           \
  extern template Matrix<S> bilinear_coeff_matrix(const MultiPoly<S>&);

EV_EXTERN_POLYFACTOR(ExactScalar)
EV_EXTERN_POLYFACTOR(FloatScalar)
#undef EV_EXTERN_POLYFACTOR

}  // namespace ev
