// Multipartite density matrices and ensembles. Basis ordering is
// lexicographic |i_1 i_2 ... i_k> with party 1 most significant; parties are
// labelled A, B, C, ... in dims order. Everything is immutable after
// construction and safe to share across threads.

#pragma once

#include <array>
#include <set>
#include <vector>

#include "ev/matrix.hpp"
#include "ev/scalar.hpp"

namespace ev {

using Dims = std::vector<int>;

size_t dims_product(const Dims& dims);
// flat index of a multi-index, party 1 most significant
size_t flat_index(const Dims& dims, const std::vector<int>& idx);
std::vector<int> unflatten_index(const Dims& dims, size_t flat);

template <class S>
struct DensityMatrix {
  Dims dims;
  Matrix<S> entries;  // D x D, Hermitian, trace 1

  // throws InvalidInput unless Hermitian and trace-1 within tol
  void validate(double tol = kDefaultTol) const;
};

// Mixture sum_f p_f * P(v_f) with P the projector onto the span of v_f.
// Vectors may be unnormalized; the projector normalization p_f/|v_f|^2 is
// applied wherever the ensemble is consumed, which keeps exact pipelines
// rational. Float ensembles are stored with unit vectors.
template <class S>
struct Ensemble {
  using Real = typename ScalarOps<S>::Real;
  Dims dims;
  std::vector<Real> weights;            // p_f > 0, sum = 1
  std::vector<std::vector<S>> vectors;  // each of length prod(dims), nonzero

  void validate(double tol = kDefaultTol) const;
  Real squared_norm(size_t f) const;
  // p_f / |v_f|^2, the coefficient of v_f v_f^dagger in the density matrix
  Real column_weight(size_t f) const;
  size_t size() const { return vectors.size(); }
};

template <class S>
DensityMatrix<S> density_from_ensemble(const Ensemble<S>& e);
template <class S>
DensityMatrix<S> density_from_ensemble_serial(const Ensemble<S>& e);

// Float mode: eigendecomposition, eigenvalues below tol*D*max|entry| dropped.
// Exact mode requires a diagonal matrix and throws
// UnsupportedExactDecomposition otherwise.
template <class S>
Ensemble<S> ensemble_from_density(const DensityMatrix<S>& rho,
                                  double tol = kDefaultTol);
template <>
Ensemble<ExactScalar> ensemble_from_density(const DensityMatrix<ExactScalar>&,
                                            double);
template <>
Ensemble<FloatScalar> ensemble_from_density(const DensityMatrix<FloatScalar>&,
                                            double);

// Transpose the listed parties (0-based). Result is Hermitian and trace-1
// but not necessarily positive.
template <class S>
Matrix<S> partial_transpose(const DensityMatrix<S>& rho,
                            const std::set<int>& parties);

struct PsdWitness {
  bool psd = false;
  double min_eigenvalue = 0;      // float mode
  std::vector<ExactScalar> ray;   // exact mode: x with x^dag M x < 0
};

// Exact mode decides by symmetric rational elimination (sign of every pivot);
// float mode checks the minimum eigenvalue against -tol.
template <class S>
PsdWitness is_positive_semidefinite(const Matrix<S>& m,
                                    double tol = kDefaultTol);
template <>
PsdWitness is_positive_semidefinite(const Matrix<ExactScalar>&, double);
template <>
PsdWitness is_positive_semidefinite(const Matrix<FloatScalar>&, double);

template <class S>
struct PptResult {
  bool ppt = false;
  bool transpose_equals_state = false;  // partial transpose == rho entrywise
  PsdWitness witness;
};

template <class S>
PptResult<S> ppt_check(const DensityMatrix<S>& rho,
                       const std::set<int>& side_a,
                       const std::set<int>& side_b,
                       double tol = kDefaultTol);

// Four Bell-pair products on [2,2,2,2], each weight 1/4.
template <class S>
Ensemble<S> smolin_state();

// h: four mutually orthogonal nonzero vectors in C^4 (unit length in float
// mode; exact mode folds the norms into the weights). a: eight nonzero
// amplitudes.
template <class S>
struct FamilyParams {
  std::array<std::vector<S>, 4> h;
  std::array<S, 8> a;

  void validate(double tol = kDefaultTol) const;
};

// The 16x4 layout (rows by |abcd>):
//   a1*h1, 0, 0, a2*h2, 0, a3*h3, a4*h4, 0,
//   0, a5*h3, a6*h4, 0, a7*h1, 0, 0, a8*h2
// Columns become the four ensemble vectors with weight 1/4 each.
template <class S>
Ensemble<S> family_state(const FamilyParams<S>& p, double tol = kDefaultTol);

template <class S>
Matrix<S> family_raw_columns(const FamilyParams<S>& p);

// v -> (U_1 (x) ... (x) U_k) v for every ensemble vector; weights unchanged.
template <class S>
Ensemble<S> apply_local_transform(const Ensemble<S>& e,
                                  const std::vector<Matrix<S>>& mats,
                                  double tol = kDefaultTol);

#define EV_EXTERN_STATES(S)                                                  \
  extern template struct DensityMatrix<S>;                                   \
  extern template struct Ensemble<S>;                                        \
  extern template DensityMatrix<S> density_from_ensemble(const Ensemble<S>&); \
  extern template DensityMatrix<S> density_from_ensemble_serial(             \
      const Ensemble<S>&);                                                   \
  extern template Matrix<S> partial_transpose(const DensityMatrix<S>&,       \
                                              const std::set<int>&);         \
  extern template PptResult<S> ppt_check(const DensityMatrix<S>&,            \
                                         const std::set<int>&,               \
                                         const std::set<int>&, double);      \
  extern template Ensemble<S> smolin_state<S>();                             \
  extern template struct FamilyParams<S>;                                    \
  extern template Ensemble<S> family_state(const FamilyParams<S>&, double);  \
  extern template Matrix<S> family_raw_columns(const FamilyParams<S>&);      \
  extern template Ensemble<S> apply_local_transform(                         \
      const Ensemble<S>&, const std::vector<Matrix<S>>&, double);

EV_EXTERN_STATES(ExactScalar)
EV_EXTERN_STATES(FloatScalar)
#undef EV_EXTERN_STATES

}  // namespace ev
