#include "ev/multipoly.hpp"

#include <algorithm>
#include <sstream>

namespace ev {

size_t signature_total_vars(const Signature& sig) {
  size_t n = 0;
  for (const auto& g : sig) n += g.var_count;
  return n;
}

size_t signature_offset(const Signature& sig, int group_id) {
  size_t off = 0;
  for (const auto& g : sig) {
    if (g.id == group_id) return off;
    off += g.var_count;
  }
  throw InvalidInput("unknown variable group");
}

int signature_var_count(const Signature& sig, int group_id) {
  for (const auto& g : sig)
    if (g.id == group_id) return g.var_count;
  throw InvalidInput("unknown variable group");
}

template <class S>
MultiPoly<S> MultiPoly<S>::constant(Signature sig, const S& c) {
  MultiPoly out(std::move(sig));
  ExpVec e(signature_total_vars(out.sig_), 0);
  out.add_term(e, c);
  return out;
}

template <class S>
MultiPoly<S> MultiPoly<S>::variable(Signature sig, int group_id, int index) {
  MultiPoly out(std::move(sig));
  size_t off = signature_offset(out.sig_, group_id);
  if (index < 0 || index >= signature_var_count(out.sig_, group_id))
    throw InvalidInput("variable index out of range");
  ExpVec e(signature_total_vars(out.sig_), 0);
  e[off + index] = 1;
  out.add_term(e, ScalarOps<S>::one());
  return out;
}

template <class S>
void MultiPoly<S>::add_term(const ExpVec& e, const S& c, double /*tol*/) {
  if (ScalarOps<S>::is_zero(c, 0.0)) return;
  auto it = terms_.find(e);
  if (it == terms_.end()) {
    terms_.emplace(e, c);
    return;
  }
  it->second += c;
  if (ScalarOps<S>::is_zero(it->second, 0.0)) terms_.erase(it);
}

template <class S>
MultiPoly<S> MultiPoly<S>::pow(unsigned n) const {
  MultiPoly out = constant(sig_, ScalarOps<S>::one());
  for (unsigned i = 0; i < n; ++i) out = out * (*this);
  return out;
}

template <class S>
int MultiPoly<S>::term_group_degree(const ExpVec& e, int group_id) const {
  size_t off = signature_offset(sig_, group_id);
  int n = signature_var_count(sig_, group_id);
  int d = 0;
  for (int i = 0; i < n; ++i) d += e[off + i];
  return d;
}

template <class S>
int MultiPoly<S>::group_degree(int group_id) const {
  int d = 0;
  for (const auto& [e, c] : terms_)
    d = std::max(d, term_group_degree(e, group_id));
  return d;
}

template <class S>
std::vector<int> MultiPoly<S>::multidegree() const {
  std::vector<int> out;
  for (const auto& g : sig_) out.push_back(group_degree(g.id));
  return out;
}

template <class S>
bool MultiPoly<S>::is_multihomogeneous() const {
  if (terms_.empty()) return true;
  for (const auto& g : sig_) {
    int d0 = term_group_degree(terms_.begin()->first, g.id);
    for (const auto& [e, c] : terms_)
      if (term_group_degree(e, g.id) != d0) return false;
  }
  return true;
}

template <class S>
S MultiPoly<S>::evaluate(const std::vector<S>& point) const {
  if (point.size() != signature_total_vars(sig_))
    throw InvalidInput("evaluation point has wrong length");
  S acc = ScalarOps<S>::zero();
  for (const auto& [e, c] : terms_) {
    S t = c;
    for (size_t i = 0; i < e.size(); ++i)
      for (uint16_t k = 0; k < e[i]; ++k) t *= point[i];
    acc += t;
  }
  return acc;
}

template <class S>
MultiPoly<S> MultiPoly<S>::substitute_linear(
    const std::vector<std::pair<int, Matrix<S>>>& subs) const {
  // replacement polynomial per variable; identity outside listed groups
  size_t nvars = signature_total_vars(sig_);
  std::vector<MultiPoly> repl(nvars);
  for (const auto& g : sig_) {
    size_t off = signature_offset(sig_, g.id);
    const Matrix<S>* m = nullptr;
    for (const auto& [gid, mat] : subs)
      if (gid == g.id) m = &mat;
    for (int i = 0; i < g.var_count; ++i) {
      if (!m) {
        repl[off + i] = variable(sig_, g.id, i);
        continue;
      }
      if (m->rows() != static_cast<size_t>(g.var_count) ||
          m->cols() != static_cast<size_t>(g.var_count))
        throw InvalidInput("substitution matrix has wrong shape");
      // r_i -> (M^T r)_i = sum_j M(j,i) r_j
      MultiPoly p(sig_);
      ExpVec e(nvars, 0);
      for (int j = 0; j < g.var_count; ++j) {
        e[off + j] = 1;
        p.add_term(e, (*m)(j, i));
        e[off + j] = 0;
      }
      repl[off + i] = std::move(p);
    }
  }
  MultiPoly out(sig_);
  for (const auto& [e, c] : terms_) {
    MultiPoly t = constant(sig_, c);
    for (size_t i = 0; i < e.size(); ++i)
      for (uint16_t k = 0; k < e[i]; ++k) t = t * repl[i];
    out = out + t;
  }
  return out;
}

template <class S>
const S& MultiPoly<S>::leading_coefficient() const {
  if (terms_.empty()) throw InvalidInput("zero polynomial has no leading term");
  return terms_.rbegin()->second;
}

template <class S>
MultiPoly<S> MultiPoly<S>::normalized() const {
  if (terms_.empty()) return *this;
  S inv = ScalarOps<S>::one() / leading_coefficient();
  return inv * (*this);
}

template <class S>
void MultiPoly<S>::erase_term(const ExpVec& e) {
  terms_.erase(e);
}

template <class S>
MultiPoly<S> MultiPoly<S>::pruned(double cutoff) const {
  if (ScalarOps<S>::exact) return *this;
  MultiPoly out(sig_);
  for (const auto& [e, c] : terms_)
    if (ScalarOps<S>::abs_approx(c) > cutoff) out.terms_.emplace(e, c);
  return out;
}

template <class S>
double MultiPoly<S>::max_abs_coeff() const {
  double m = 0;
  for (const auto& [e, c] : terms_)
    m = std::max(m, ScalarOps<S>::abs_approx(c));
  return m;
}

template <class S>
std::string MultiPoly<S>::to_string() const {
  if (terms_.empty()) return "0";
  std::ostringstream os;
  bool first = true;
  // descending lexicographic term order
  for (auto it = terms_.rbegin(); it != terms_.rend(); ++it) {
    if (!first) os << " + ";
    first = false;
    os << scalar_to_string(it->second);
    size_t off = 0;
    bool any = false;
    for (const auto& g : sig_) {
      for (int i = 0; i < g.var_count; ++i) {
        uint16_t e = it->first[off + i];
        if (e == 0) continue;
        os << (any ? " " : " * ");
        any = true;
        os << "r" << g.id << "_" << i << "^" << e;
      }
      off += g.var_count;
    }
  }
  return os.str();
}

template <class S>
MultiPoly<S> poly_det(const std::vector<std::vector<MultiPoly<S>>>& m) {
  size_t n = m.size();
  if (n == 0) throw InvalidInput("empty matrix");
  for (const auto& row : m)
    if (row.size() != n) throw InvalidInput("determinant of non-square matrix");
  const Signature& sig = m[0][0].signature();

  // dp over column subsets: det of first popcount(mask) rows, columns in mask
  std::vector<MultiPoly<S>> dp(size_t(1) << n);
  dp[0] = MultiPoly<S>::constant(sig, ScalarOps<S>::one());
  for (uint32_t mask = 1; mask < (uint32_t(1) << n); ++mask) {
    int k = __builtin_popcount(mask);
    MultiPoly<S> acc(sig);
    int pos = 0;
    for (size_t j = 0; j < n; ++j) {
      if (!(mask & (uint32_t(1) << j))) continue;
      const MultiPoly<S>& entry = m[k - 1][j];
      if (!entry.is_zero()) {
        MultiPoly<S> t = entry * dp[mask & ~(uint32_t(1) << j)];
        if ((k - 1 + pos) % 2 == 0)
          acc = acc + t;
        else
          acc = acc - t;
      }
      ++pos;
    }
    dp[mask] = std::move(acc);
  }
  return dp[(size_t(1) << n) - 1];
}

template <class S>
std::optional<MultiPoly<S>> divide_exact(const MultiPoly<S>& p,
                                         const MultiPoly<S>& q, double tol) {
  if (q.is_zero()) throw InvalidInput("division by zero polynomial");
  if (!(p.signature() == q.signature()))
    throw InvalidInput("polynomial group signatures differ");
  MultiPoly<S> quotient(p.signature());
  double scale = std::max(1.0, p.max_abs_coeff());
  MultiPoly<S> rem = ScalarOps<S>::exact ? p : p.pruned(tol * scale);
  const auto& ltq = *q.terms().rbegin();
  while (!rem.is_zero()) {
    ExpVec lead = rem.terms().rbegin()->first;
    S lead_c = rem.terms().rbegin()->second;
    ExpVec diff(lead.size());
    bool divisible = true;
    for (size_t i = 0; i < diff.size(); ++i) {
      if (lead[i] < ltq.first[i]) {
        divisible = false;
        break;
      }
      diff[i] = lead[i] - ltq.first[i];
    }
    if (!divisible) return std::nullopt;
    MultiPoly<S> mono(p.signature());
    mono.add_term(diff, lead_c / ltq.second);
    quotient = quotient + mono;
    rem = rem - mono * q;
    // the leading term cancels by construction; clear float residue there
    rem.erase_term(lead);
    if (!ScalarOps<S>::exact) rem = rem.pruned(tol * scale);
  }
  if (ScalarOps<S>::exact && !(quotient * q == p)) return std::nullopt;
  return quotient;
}

template class MultiPoly<ExactScalar>;
template class MultiPoly<FloatScalar>;
template MultiPoly<ExactScalar> poly_det(
    const std::vector<std::vector<MultiPoly<ExactScalar>>>&);
template MultiPoly<FloatScalar> poly_det(
    const std::vector<std::vector<MultiPoly<FloatScalar>>>&);
template std::optional<MultiPoly<ExactScalar>> divide_exact(
    const MultiPoly<ExactScalar>&, const MultiPoly<ExactScalar>&, double);
template std::optional<MultiPoly<FloatScalar>> divide_exact(
    const MultiPoly<FloatScalar>&, const MultiPoly<FloatScalar>&, double);

}  // namespace ev
