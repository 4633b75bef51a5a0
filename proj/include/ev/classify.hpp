// Turns variety polynomials into verdicts: the linearity test behind the
// separability necessary condition, Segre-structure detection for two-row
// pencils, and the lambda invariants with their equivalence decision for the
// four-factor state family.

#pragma once

#include <array>

#include "ev/polyfactor.hpp"
#include "ev/varieties.hpp"

namespace ev {

enum class LinearityKind { Linear, Nonlinear, Degenerate, Undecided };

struct SegreCertificate {
  std::vector<int> support0, support1;  // variable indices used by each row
  int span0 = 0, span1 = 0;             // dimensions of the component spans
  int common = 0;                       // dim of their intersection
  bool transposed = false;              // detection ran on the transpose
  // reported Segre parameters: P^1 x P^{common-1}
  int segre_rows() const { return 1; }
  int segre_cols() const { return common - 1; }
};

template <class S>
struct FactorReport {
  enum class Kind { LinearSplit, NonlinearIrreducible, Undecided };
  MultiPoly<S> poly;  // monic
  Kind kind = Kind::Undecided;
  std::vector<LinearForm<S>> forms;       // LinearSplit: per-group linear forms
  std::optional<Matrix<S>> coeff_matrix;  // (1,1) factors: 2x2 matrix
  std::optional<S> coeff_det;
  std::optional<TensorMinorCertificate<S>> tensor_cert;
  bool numeric = false;
  std::string note;
};

template <class S>
struct LinearityVerdict {
  LinearityKind kind = LinearityKind::Undecided;
  std::string factorization_kind = "none";
  S constant{};  // minor = constant * prod factors, when factored
  std::vector<FactorReport<S>> factors;
  std::optional<SegreCertificate> segre;
  std::string reason;

  std::vector<LinearForm<S>> linear_forms() const {
    std::vector<LinearForm<S>> out;
    for (const auto& f : factors)
      out.insert(out.end(), f.forms.begin(), f.forms.end());
    return out;
  }
};

struct SegreDetection {
  bool found = false;
  SegreCertificate cert;
};

// Requires a two-row pencil (or two columns, handled on the transpose). The
// rank-one locus is a cone over a Segre product exactly when the two rows
// use disjoint variables and their component spans share a subspace of
// dimension >= 2; that locus is irreducible and never a finite union of
// products of linear subspaces.
template <class S>
SegreDetection segre_detect(const LinearPencil<S>& pencil,
                            double tol = kDefaultTol);

template <class S>
LinearityVerdict<S> is_linear_variety(const VarietyPolynomials<S>& polys,
                                      const LinearPencil<S>* pencil,
                                      uint64_t seed, double tol = kDefaultTol);

enum class SepVerdict {
  EntangledAtCut,
  ConsistentWithSeparable,  // necessary condition only
  Degenerate,
  Undecided
};

template <class S>
struct AnalysisResult {
  CutSpec cut;
  size_t row_dim = 0, col_dim = 0, ensemble_size = 0;
  VarietyPolynomials<S> polys;
  LinearityVerdict<S> verdict;
  SepVerdict sep = SepVerdict::Undecided;
};

// Float mode canonicalizes through the eigen-ensemble of the density matrix
// before building the pencil; exact mode analyzes the ensemble as given.
template <class S>
AnalysisResult<S> separability_verdict(const Ensemble<S>& e, const CutSpec& cut,
                                       std::optional<int> rank_threshold = {},
                                       uint64_t seed = 1,
                                       double tol = kDefaultTol);

// ---- the four-factor family ----

template <class S>
struct FamilyInvariants {
  std::array<Matrix<S>, 4> c;  // 2x2 factor coefficient matrices
  std::vector<S> lambda;       // 4 values when built from family parameters
};

// lambda_1 = -a1/a7, lambda_2 = -a3/a5, lambda_3 = -a4/a6, lambda_4 = -a2/a8
// C matrices per factor: diag(a1,a7), antidiag(a3,a5), antidiag(a4,a6),
// diag(a2,a8).
template <class S>
FamilyInvariants<S> family_lambda(const FamilyParams<S>& p);

template <class S>
FamilyInvariants<S> invariants_from_factor_matrices(
    const std::vector<Matrix<S>>& cs);

enum class EquivalenceKind { Equivalent, Inequivalent, Unknown };

// base + rad * sqrt(rad_sq); rad is empty when no radical is needed
template <class S>
struct ExtMatrix {
  Matrix<S> base, rad;
  S rad_sq{};
  bool has_radical = false;
};

template <class S>
struct EquivalenceResult {
  EquivalenceKind kind = EquivalenceKind::Unknown;
  std::array<int, 4> perm{0, 1, 2, 3};
  ExtMatrix<S> t1, t2;
  std::string reason;
};

// Decides whether invertible T1, T2 and a factor permutation sigma exist
// with T1^T C_i T2 proportional to C'_sigma(i) for all i — a necessary
// condition for local equivalence of the underlying states. All 24
// assignments are swept; scale-free spectra tr^2/det of the pair ratios
// refute, eigen-structure constructs, and the witness re-verifies exactly.
template <class S>
EquivalenceResult<S> family_equivalence(const FamilyInvariants<S>& a,
                                        const FamilyInvariants<S>& b,
                                        double tol = kDefaultTol);

// ---- invariant fingerprints for generic state comparison ----

struct Fingerprint {
  std::vector<int> multidegree;
  int minor_count = 0;
  bool degenerate = false;
  int factor_count = 0;
  std::vector<int> factor_ranks;  // sorted; 2x2 coefficient matrix ranks
};

template <class S>
Fingerprint fingerprint_of(const AnalysisResult<S>& r,
                           double tol = kDefaultTol);
bool fingerprints_match(const Fingerprint& a, const Fingerprint& b);

#define EV_EXTERN_CLASSIFY(S)                                                \
  extern template struct FactorReport<S>;                                    \
  extern template struct LinearityVerdict<S>;                                \
  extern template SegreDetection segre_detect(const LinearPencil<S>&,        \
                                              double);                       \
  extern template LinearityVerdict<S> is_linear_variety(                     \
      const VarietyPolynomials<S>&, const LinearPencil<S>*, uint64_t,        \
      double);                                                               \
  extern template AnalysisResult<S> separability_verdict(                    \
      const Ensemble<S>&, const CutSpec&, std::optional<int>, uint64_t,      \
      double);                                                               \
  extern template FamilyInvariants<S> family_lambda(const FamilyParams<S>&); \
  extern template FamilyInvariants<S> invariants_from_factor_matrices(       \
      const std::vector<Matrix<S>>&);                                        \
  extern template EquivalenceResult<S> family_equivalence(                   \
      const FamilyInvariants<S>&, const FamilyInvariants<S>&, double);       \
  extern template Fingerprint fingerprint_of(const AnalysisResult<S>&,       \
                                             double);

EV_EXTERN_CLASSIFY(ExactScalar)
EV_EXTERN_CLASSIFY(FloatScalar)
#undef EV_EXTERN_CLASSIFY

}  // namespace ev
