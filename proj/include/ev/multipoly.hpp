// Sparse multihomogeneous polynomials in grouped variables. Group g owns
// variables r{g}_0 .. r{g}_{d_g-1}; exponent vectors concatenate the groups
// in order. Terms live in canonical sparse form: sorted exponent keys, no
// zero coefficients.

#pragma once

#include <cstdint>
#include <map>
#include <optional>
#include <string>
#include <vector>

#include "ev/matrix.hpp"
#include "ev/scalar.hpp"

namespace ev {

using ExpVec = std::vector<uint16_t>;

struct GroupSig {
  int id;         // 1-based, as rendered
  int var_count;  // d_g

  friend bool operator==(const GroupSig&, const GroupSig&) = default;
};

using Signature = std::vector<GroupSig>;

size_t signature_total_vars(const Signature& sig);
// byte offset of group g's first variable inside an exponent vector
size_t signature_offset(const Signature& sig, int group_id);
int signature_var_count(const Signature& sig, int group_id);

template <class S>
class MultiPoly {
 public:
  MultiPoly() = default;
  explicit MultiPoly(Signature sig) : sig_(std::move(sig)) {}

  static MultiPoly zero(Signature sig) { return MultiPoly(std::move(sig)); }
  static MultiPoly constant(Signature sig, const S& c);
  // the variable r{group}_{index}
  static MultiPoly variable(Signature sig, int group_id, int index);

  const Signature& signature() const { return sig_; }
  const std::map<ExpVec, S>& terms() const { return terms_; }
  bool is_zero() const { return terms_.empty(); }
  size_t term_count() const { return terms_.size(); }

  void add_term(const ExpVec& e, const S& c, double tol = 0.0);
  void erase_term(const ExpVec& e);

  friend MultiPoly operator+(const MultiPoly& a, const MultiPoly& b) {
    a.check_signature(b);
    MultiPoly out = a;
    for (const auto& [e, c] : b.terms_) out.add_term(e, c);
    return out;
  }
  friend MultiPoly operator-(const MultiPoly& a, const MultiPoly& b) {
    a.check_signature(b);
    MultiPoly out = a;
    for (const auto& [e, c] : b.terms_) out.add_term(e, -c);
    return out;
  }
  friend MultiPoly operator*(const MultiPoly& a, const MultiPoly& b) {
    a.check_signature(b);
    MultiPoly out(a.sig_);
    for (const auto& [ea, ca] : a.terms_)
      for (const auto& [eb, cb] : b.terms_) {
        ExpVec e(ea.size());
        for (size_t i = 0; i < e.size(); ++i) e[i] = ea[i] + eb[i];
        out.add_term(e, ca * cb);
      }
    return out;
  }
  friend MultiPoly operator*(const S& c, const MultiPoly& a) {
    MultiPoly out(a.sig_);
    if (ScalarOps<S>::is_zero(c, 0.0)) return out;
    for (const auto& [e, v] : a.terms_) out.terms_.emplace(e, c * v);
    return out;
  }
  friend MultiPoly operator-(const MultiPoly& a) {
    return ScalarOps<S>::from_int(-1) * a;
  }
  friend bool operator==(const MultiPoly& a, const MultiPoly& b) {
    return a.sig_ == b.sig_ && a.terms_ == b.terms_;
  }

  MultiPoly pow(unsigned n) const;

  // per-group degree of one term / of the whole polynomial (max over terms)
  int term_group_degree(const ExpVec& e, int group_id) const;
  int group_degree(int group_id) const;
  std::vector<int> multidegree() const;
  // homogeneous per group, with constant per-group degree across terms
  bool is_multihomogeneous() const;

  // point: one coefficient vector per group, concatenated like exponents
  S evaluate(const std::vector<S>& point) const;

  // substitute r^{(g)} -> M^T r^{(g)} for each listed group (matrix d_g x d_g)
  MultiPoly substitute_linear(
      const std::vector<std::pair<int, Matrix<S>>>& subs) const;

  // coefficient of the lexicographically greatest exponent vector
  const S& leading_coefficient() const;
  // divide through by the leading coefficient
  MultiPoly normalized() const;

  // drop terms with |coefficient| <= cutoff (float mode hygiene; no-op exact)
  MultiPoly pruned(double cutoff) const;

  double max_abs_coeff() const;

  std::string to_string() const;

 private:
  void check_signature(const MultiPoly& other) const {
    if (!(sig_ == other.sig_))
      throw InvalidInput("polynomial group signatures differ");
  }

  Signature sig_;
  std::map<ExpVec, S> terms_;
};

// Determinant of a square matrix of polynomials by Laplace expansion with
// memoization over column subsets.
template <class S>
MultiPoly<S> poly_det(const std::vector<std::vector<MultiPoly<S>>>& m);

// p = q * s exactly (or within tol * |p| in float mode) => returns s.
template <class S>
std::optional<MultiPoly<S>> divide_exact(const MultiPoly<S>& p,
                                         const MultiPoly<S>& q,
                                         double tol = kDefaultTol);

extern template class MultiPoly<ExactScalar>;
extern template class MultiPoly<FloatScalar>;
extern template MultiPoly<ExactScalar> poly_det(
    const std::vector<std::vector<MultiPoly<ExactScalar>>>&);
extern template MultiPoly<FloatScalar> poly_det(
    const std::vector<std::vector<MultiPoly<FloatScalar>>>&);
extern template std::optional<MultiPoly<ExactScalar>> divide_exact(
    const MultiPoly<ExactScalar>&, const MultiPoly<ExactScalar>&, double);
extern template std::optional<MultiPoly<FloatScalar>> divide_exact(
    const MultiPoly<FloatScalar>&, const MultiPoly<FloatScalar>&, double);

}  // namespace ev
