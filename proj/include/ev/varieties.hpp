// Cuts, linear pencils and their minor loci. A cut splits the parties into
// ordered row-side groups (one projective factor each) and a column side.
// Blocking the representation matrix along the row-side basis gives the
// pencil S(r) = sum_I r_I B_I with r_I the product of one variable per
// group; the rank-deficiency locus of S is the invariant variety.

#pragma once

#include <optional>
#include <string>

#include "ev/multipoly.hpp"
#include "ev/states.hpp"

namespace ev {

struct CutSpec {
  Dims dims;
  std::vector<std::vector<int>> row_groups;  // party indices, each ascending
  std::vector<int> col_parties;              // ascending

  size_t group_count() const { return row_groups.size(); }
  size_t group_dim(size_t g) const;
  size_t row_dim() const;  // D_P = product of group dims
  size_t col_dim() const;  // D_Q
  Signature signature() const;
  std::string to_string() const;
  void validate() const;
};

// Grammar: GROUPS ["|" COLS], GROUPS = group (":" group)*, parties are
// letters A.. in dims order; the column side defaults to the complement.
CutSpec parse_cut(const std::string& text, const Dims& dims);

template <class S>
struct RepresentationMatrix {
  Matrix<S> entries;               // D x g; float mode columns carry sqrt(w_f)
  std::vector<Rational> weight_sq; // exact mode: w_f with true column sqrt(w_f)*v_f
};

template <class S>
RepresentationMatrix<S> representation_matrix(const Ensemble<S>& e);

template <class S>
struct LinearPencil {
  CutSpec cut;
  size_t ensemble_size = 0;
  std::vector<Matrix<S>> blocks;    // D_P blocks, each D_Q x g
  std::vector<Rational> weight_sq;  // exact column weights (empty in float)

  // S(r) as a D_Q x g matrix of multilinear polynomials
  std::vector<std::vector<MultiPoly<S>>> symbolic() const;
};

template <class S>
LinearPencil<S> build_pencil(const Ensemble<S>& e, const CutSpec& cut);

enum class Degeneracy { None, WholeSpace };

template <class S>
struct MinorPolynomial {
  MultiPoly<S> poly;
  std::vector<int> row_set, col_set;
  Rational scale_sq = 1;     // exact: squared scale left unfolded
  bool scale_folded = true;  // false when scale_sq is not a perfect square
};

template <class S>
struct VarietyPolynomials {
  int threshold = 0;
  Degeneracy degeneracy = Degeneracy::None;
  std::vector<MinorPolynomial<S>> minors;
};

// All t x t minors of S(r), t defaulting to min(D_Q, g). Requesting the
// default threshold with g < D_Q reports the whole-space degeneracy; an
// explicit smaller threshold exposes the refined rank locus instead.
template <class S>
VarietyPolynomials<S> variety_polynomials(
    const LinearPencil<S>& pencil, std::optional<int> rank_threshold = {});
template <class S>
VarietyPolynomials<S> variety_polynomials_serial(
    const LinearPencil<S>& pencil, std::optional<int> rank_threshold = {});

// point holds one coefficient block per group, concatenated in group order;
// a group block of all zeros is rejected.
template <class S>
struct PencilValue {
  Matrix<S> value;
  size_t rank = 0;
};

template <class S>
PencilValue<S> evaluate_pencil(const LinearPencil<S>& pencil,
                               const std::vector<S>& point,
                               double tol = kDefaultTol);

// M(r) = sum_{I,I'} r_I conj(r_{I'}) rho_{I,I'} assembled directly from the
// density matrix blocks; equals S(r) S(r)^dag for any realization.
template <class S>
Matrix<S> conjugated_block_sum(const DensityMatrix<S>& rho,
                               const CutSpec& cut,
                               const std::vector<S>& point);

struct TransformLawReport {
  bool ok = false;
  double max_drift = 0;   // square case: spread of the per-point constant
  size_t points_used = 0;
};

// Samples grouped points r, applies the per-group substitution
// r -> U_g^T r, and checks det S_transformed(r) = c * det S(r_sub) with one
// constant c across all points (rank equality instead when S is not square).
template <class S>
TransformLawReport verify_transformation_law(const Ensemble<S>& e,
                                             const CutSpec& cut,
                                             const std::vector<Matrix<S>>& mats,
                                             int trials, uint64_t seed,
                                             double tol = kDefaultTol);

#define EV_EXTERN_VARIETIES(S)                                               \
  extern template struct RepresentationMatrix<S>;                            \
  extern template RepresentationMatrix<S> representation_matrix(             \
      const Ensemble<S>&);                                                   \
  extern template struct LinearPencil<S>;                                    \
  extern template LinearPencil<S> build_pencil(const Ensemble<S>&,           \
                                               const CutSpec&);              \
  extern template struct VarietyPolynomials<S>;                              \
  extern template VarietyPolynomials<S> variety_polynomials(                 \
      const LinearPencil<S>&, std::optional<int>);                           \
  extern template VarietyPolynomials<S> variety_polynomials_serial(          \
      const LinearPencil<S>&, std::optional<int>);                           \
  extern template PencilValue<S> evaluate_pencil(const LinearPencil<S>&,     \
                                                 const std::vector<S>&,      \
                                                 double);                    \
  extern template Matrix<S> conjugated_block_sum(const DensityMatrix<S>&,    \
                                                 const CutSpec&,             \
                                                 const std::vector<S>&);     \
  extern template TransformLawReport verify_transformation_law(              \
      const Ensemble<S>&, const CutSpec&, const std::vector<Matrix<S>>&,     \
      int, uint64_t, double);

EV_EXTERN_VARIETIES(ExactScalar)
EV_EXTERN_VARIETIES(FloatScalar)
#undef EV_EXTERN_VARIETIES

}  // namespace ev
