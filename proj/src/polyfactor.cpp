#include "ev/polyfactor.hpp"

#include <Eigen/Dense>

#include <algorithm>
#include <map>
#include <set>
#include <sstream>

#include "ev/random.hpp"

namespace ev {

namespace {

// ---- exponent slicing helpers ----

ExpVec group_part(const Signature& sig, int group_id, const ExpVec& e) {
  size_t off = signature_offset(sig, group_id);
  int n = signature_var_count(sig, group_id);
  return ExpVec(e.begin() + off, e.begin() + off + n);
}

ExpVec other_part(const Signature& sig, int group_id, const ExpVec& e) {
  size_t off = signature_offset(sig, group_id);
  int n = signature_var_count(sig, group_id);
  ExpVec out;
  out.reserve(e.size() - n);
  for (size_t i = 0; i < e.size(); ++i)
    if (i < off || i >= off + n) out.push_back(e[i]);
  return out;
}

ExpVec splice(const Signature& sig, int group_id, const ExpVec& grp,
              const ExpVec& other) {
  size_t off = signature_offset(sig, group_id);
  ExpVec out;
  out.reserve(grp.size() + other.size());
  out.insert(out.end(), other.begin(), other.begin() + off);
  out.insert(out.end(), grp.begin(), grp.end());
  out.insert(out.end(), other.begin() + off, other.end());
  return out;
}

template <class S>
S coeff_at(const MultiPoly<S>& p, const ExpVec& e) {
  auto it = p.terms().find(e);
  return it == p.terms().end() ? ScalarOps<S>::zero() : it->second;
}

template <class S>
bool poly_eq(const MultiPoly<S>& a, const MultiPoly<S>& b, double tol) {
  if constexpr (ScalarOps<S>::exact) return a == b;
  MultiPoly<S> d = a - b;
  double scale = std::max({1.0, a.max_abs_coeff(), b.max_abs_coeff()});
  return d.max_abs_coeff() <= tol * scale;
}

// partial derivative of p by global variable vi, evaluated at point
template <class S>
S partial_eval(const MultiPoly<S>& p, size_t vi, const std::vector<S>& point) {
  S acc = ScalarOps<S>::zero();
  for (const auto& [e, c] : p.terms()) {
    if (e[vi] == 0) continue;
    S t = c * ScalarOps<S>::from_int(e[vi]);
    for (size_t i = 0; i < e.size(); ++i) {
      uint16_t k = e[i] - (i == vi ? 1 : 0);
      for (uint16_t j = 0; j < k; ++j) t *= point[i];
    }
    acc += t;
  }
  return acc;
}

}  // namespace

template <class S>
MultiPoly<S> LinearForm<S>::to_poly(const Signature& sig) const {
  MultiPoly<S> p(sig);
  for (size_t i = 0; i < coeffs.size(); ++i) {
    if (ScalarOps<S>::is_zero(coeffs[i], 0.0)) continue;
    p = p + coeffs[i] * MultiPoly<S>::variable(sig, group, static_cast<int>(i));
  }
  return p;
}

template <class S>
LinearForm<S> LinearForm<S>::normalized() const {
  LinearForm out = *this;
  for (const S& c : coeffs) {
    if (ScalarOps<S>::is_zero(c, 0.0)) continue;
    S inv = ScalarOps<S>::one() / c;
    for (auto& x : out.coeffs) x = inv * x;
    break;
  }
  return out;
}

template <class S>
std::string LinearForm<S>::to_string() const {
  std::ostringstream os;
  bool first = true;
  for (size_t i = 0; i < coeffs.size(); ++i) {
    if (ScalarOps<S>::is_zero(coeffs[i], 0.0)) continue;
    if (!first) os << " + ";
    first = false;
    os << scalar_to_string(coeffs[i]) << " * r" << group << "_" << i << "^1";
  }
  if (first) os << "0";
  return os.str();
}

// ---- group-separable factoring ----

template <class S>
GroupSeparableResult<S> group_separable_factor(const MultiPoly<S>& p,
                                               double tol) {
  if (p.is_zero()) throw InvalidInput("cannot factor the zero polynomial");
  if (!p.is_multihomogeneous())
    throw InvalidInput("group factoring needs a multihomogeneous polynomial");
  const Signature& sig = p.signature();

  // float mode: anchor the pivot away from roundoff junk
  ExpVec pivot;
  if constexpr (ScalarOps<S>::exact) {
    pivot = p.terms().begin()->first;
  } else {
    double cut = tol * std::max(1.0, p.max_abs_coeff());
    for (const auto& [e, c] : p.terms())
      if (ScalarOps<S>::abs_approx(c) > cut) {
        pivot = e;
        break;
      }
    if (pivot.empty()) pivot = p.terms().begin()->first;
  }
  const S pivot_c = coeff_at(p, pivot);

  // candidate per-group slices through the pivot
  GroupFactorization<S> fac;
  fac.per_group.reserve(sig.size());
  for (const auto& g : sig) {
    MultiPoly<S> slice(sig);
    std::set<ExpVec> seen;
    ExpVec pivot_other = other_part(sig, g.id, pivot);
    for (const auto& [e, c] : p.terms()) {
      ExpVec ge = group_part(sig, g.id, e);
      if (!seen.insert(ge).second) continue;
      ExpVec full = splice(sig, g.id, ge, pivot_other);
      S v = coeff_at(p, full);
      ExpVec key(e.size(), 0);
      size_t off = signature_offset(sig, g.id);
      for (size_t i = 0; i < ge.size(); ++i) key[off + i] = ge[i];
      slice.add_term(key, v);
    }
    fac.per_group.push_back(std::move(slice));
  }

  // p * pivot^(G-1) = prod slices  =>  p = c * prod
  S denom = ScalarOps<S>::one();
  for (size_t i = 0; i + 1 < sig.size(); ++i) denom *= pivot_c;
  fac.constant = ScalarOps<S>::one() / denom;

  MultiPoly<S> prod = MultiPoly<S>::constant(sig, fac.constant);
  for (const auto& f : fac.per_group) prod = prod * f;
  if (poly_eq(prod, p, tol)) return fac;

  // not rank one; hunt a 2x2 minor through the pivot
  for (const auto& g : sig) {
    std::set<ExpVec> grp_pats, other_pats;
    grp_pats.insert(group_part(sig, g.id, pivot));
    other_pats.insert(other_part(sig, g.id, pivot));
    for (const auto& [e, c] : p.terms()) {
      grp_pats.insert(group_part(sig, g.id, e));
      other_pats.insert(other_part(sig, g.id, e));
    }
    ExpVec pg = group_part(sig, g.id, pivot);
    ExpVec po = other_part(sig, g.id, pivot);
    for (const auto& r : grp_pats) {
      if (r == pg) continue;
      for (const auto& c : other_pats) {
        if (c == po) continue;
        S a = pivot_c;
        S b = coeff_at(p, splice(sig, g.id, pg, c));
        S cc = coeff_at(p, splice(sig, g.id, r, po));
        S d = coeff_at(p, splice(sig, g.id, r, c));
        S minor = a * d - b * cc;
        double scale = std::max(1.0, p.max_abs_coeff());
        if (!ScalarOps<S>::is_zero(minor, tol * scale * scale)) {
          TensorMinorCertificate<S> cert;
          cert.group = g.id;
          cert.pivot = pivot;
          cert.row_exp = splice(sig, g.id, r, po);
          cert.col_exp = splice(sig, g.id, pg, c);
          cert.minor_value = minor;
          return cert;
        }
      }
    }
  }
  // verification失败 without a witness only happens at float noise level
  throw NumericFailure("separability test could not certify either outcome");
}

// ---- binary forms ----

namespace {

struct GaussInt {
  mpz_class re, im;
};

mpz_class gi_norm(const GaussInt& z) { return z.re * z.re + z.im * z.im; }

bool gi_divide(const GaussInt& a, const GaussInt& b, GaussInt& out) {
  // a / b in Z[i] if exact
  mpz_class n = gi_norm(b);
  if (n == 0) return false;
  mpz_class re = a.re * b.re + a.im * b.im;
  mpz_class im = a.im * b.re - a.re * b.im;
  if (re % n != 0 || im % n != 0) return false;
  out = {re / n, im / n};
  return true;
}

// all divisors of z up to units; empty when the norm is too large to factor
std::vector<GaussInt> gi_divisors(const GaussInt& z, long norm_limit) {
  mpz_class n = gi_norm(z);
  if (n == 0 || n > norm_limit) return {};
  // factor the norm, then split each rational prime into Gaussian primes
  std::vector<GaussInt> primes;
  mpz_class m = n;
  for (mpz_class p = 2; p * p <= m; ++p) {
    if (m % p != 0) continue;
    while (m % p == 0) m /= p;
    if (p == 2) {
      primes.push_back({1, 1});
    } else if (p % 4 == 3) {
      primes.push_back({p, 0});
    } else {
      for (mpz_class a = 1; a * a * 2 <= p; ++a) {
        mpz_class b2 = p - a * a;
        if (mpz_perfect_square_p(b2.get_mpz_t())) {
          mpz_class b;
          mpz_sqrt(b.get_mpz_t(), b2.get_mpz_t());
          primes.push_back({a, b});
          primes.push_back({a, -b});
          break;
        }
      }
    }
  }
  if (m > 1) {
    if (m % 4 == 3) {
      primes.push_back({m, 0});
    } else if (m == 2) {
      primes.push_back({1, 1});
    } else {
      for (mpz_class a = 1; a * a * 2 <= m; ++a) {
        mpz_class b2 = m - a * a;
        if (mpz_perfect_square_p(b2.get_mpz_t())) {
          mpz_class b;
          mpz_sqrt(b.get_mpz_t(), b2.get_mpz_t());
          primes.push_back({a, b});
          primes.push_back({a, -b});
          break;
        }
      }
    }
  }
  // exponent of each prime in z
  std::vector<std::pair<GaussInt, int>> powered;
  GaussInt rest = z;
  for (const auto& pr : primes) {
    int e = 0;
    GaussInt q;
    while (gi_divide(rest, pr, q)) {
      rest = q;
      ++e;
    }
    if (e > 0) powered.push_back({pr, e});
  }
  std::vector<GaussInt> divisors{{1, 0}};
  for (const auto& [pr, e] : powered) {
    std::vector<GaussInt> next;
    for (const auto& d : divisors) {
      GaussInt cur = d;
      next.push_back(cur);
      for (int k = 0; k < e; ++k) {
        cur = {cur.re * pr.re - cur.im * pr.im, cur.re * pr.im + cur.im * pr.re};
        next.push_back(cur);
      }
    }
    divisors = std::move(next);
    if (divisors.size() > 4096) return {};
  }
  return divisors;
}

ExactScalar gi_to_scalar(const GaussInt& z) {
  return ExactScalar(Rational(z.re), Rational(z.im));
}

// exact roots of sum c_k t^k; returns nullopt when roots leave the Gaussian
// rationals or the search is out of its depth
std::optional<std::vector<ExactScalar>> exact_poly_roots(
    std::vector<ExactScalar> c) {
  while (!c.empty() && c.back().is_zero()) c.pop_back();
  if (c.size() <= 1) return std::vector<ExactScalar>{};
  size_t deg = c.size() - 1;
  if (deg == 1) return std::vector<ExactScalar>{-c[0] / c[1]};
  if (deg == 2) {
    ExactScalar disc = c[1] * c[1] - ExactScalar(4) * c[2] * c[0];
    auto root = exact_complex_sqrt(disc);
    if (!root) return std::nullopt;
    ExactScalar two_a = ExactScalar(2) * c[2];
    return std::vector<ExactScalar>{(-c[1] + *root) / two_a,
                                    (-c[1] - *root) / two_a};
  }
  // rational root search: clear denominators, enumerate p/q over Z[i] divisors
  mpz_class lcm = 1;
  for (const auto& x : c) {
    mpz_lcm(lcm.get_mpz_t(), lcm.get_mpz_t(), x.re.get_den().get_mpz_t());
    mpz_lcm(lcm.get_mpz_t(), lcm.get_mpz_t(), x.im.get_den().get_mpz_t());
  }
  std::vector<GaussInt> zc;
  for (const auto& x : c) {
    Rational re = x.re * Rational(lcm), im = x.im * Rational(lcm);
    zc.push_back({re.get_num(), im.get_num()});
  }
  const long kNormLimit = 1000000000L;
  auto ps = gi_divisors(zc.front(), kNormLimit);
  auto qs = gi_divisors(zc.back(), kNormLimit);
  if (ps.empty() || qs.empty()) return std::nullopt;
  const ExactScalar units[4] = {ExactScalar(1), ExactScalar(-1),
                                ExactScalar(Rational(0), Rational(1)),
                                ExactScalar(Rational(0), Rational(-1))};
  std::vector<ExactScalar> roots;
  std::vector<ExactScalar> work = c;
  while (work.size() - 1 > 2) {
    bool found = false;
    for (const auto& p : ps) {
      for (const auto& q : qs) {
        for (const auto& u : units) {
          ExactScalar cand = u * gi_to_scalar(p) / gi_to_scalar(q);
          ExactScalar acc;
          for (size_t k = work.size(); k-- > 0;) acc = acc * cand + work[k];
          if (acc.is_zero()) {
            roots.push_back(cand);
            // synthetic division by (t - cand)
            std::vector<ExactScalar> next(work.size() - 1);
            ExactScalar carry = work.back();
            for (size_t k = work.size() - 1; k-- > 0;) {
              next[k] = carry;
              carry = work[k] + carry * cand;
            }
            work = std::move(next);
            found = true;
            break;
          }
        }
        if (found) break;
      }
      if (found) break;
    }
    if (!found) return std::nullopt;
  }
  auto rest = exact_poly_roots(work);
  if (!rest) return std::nullopt;
  roots.insert(roots.end(), rest->begin(), rest->end());
  return roots;
}

std::vector<FloatScalar> float_poly_roots(std::vector<FloatScalar> c) {
  double scale = 0;
  for (auto& x : c) scale = std::max(scale, std::abs(x));
  while (c.size() > 1 && std::abs(c.back()) <= 1e-14 * scale) c.pop_back();
  if (c.size() <= 1) return {};
  size_t deg = c.size() - 1;
  Eigen::MatrixXcd comp = Eigen::MatrixXcd::Zero(deg, deg);
  for (size_t i = 0; i + 1 < deg; ++i) comp(i + 1, i) = 1.0;
  for (size_t i = 0; i < deg; ++i) comp(i, deg - 1) = -c[i] / c[deg];
  Eigen::ComplexEigenSolver<Eigen::MatrixXcd> es(comp);
  std::vector<FloatScalar> roots(deg);
  for (size_t i = 0; i < deg; ++i) roots[i] = es.eigenvalues()(i);
  return roots;
}

template <class S>
void check_single_group(const MultiPoly<S>& f, int group_id) {
  const Signature& sig = f.signature();
  for (const auto& g : sig) {
    if (g.id == group_id) continue;
    if (f.group_degree(g.id) != 0)
      throw InvalidInput("polynomial involves variables outside the group");
  }
  if (!f.is_multihomogeneous())
    throw InvalidInput("expected a homogeneous form");
}

}  // namespace

template <class S>
std::optional<BinaryFactorization<S>> binary_linear_factors(
    const MultiPoly<S>& f, int group_id, double tol) {
  if (f.is_zero()) throw InvalidInput("cannot factor the zero polynomial");
  check_single_group(f, group_id);
  const Signature& sig = f.signature();
  if (signature_var_count(sig, group_id) != 2)
    throw InvalidInput("binary factoring needs a 2-variable group");
  size_t off = signature_offset(sig, group_id);
  int d = f.group_degree(group_id);

  std::vector<S> c(d + 1, ScalarOps<S>::zero());  // coeff of x^k y^(d-k)
  for (const auto& [e, v] : f.terms()) c[e[off]] = v;

  int kmin = 0, kmax = d;
  double cut = ScalarOps<S>::exact ? 0.0 : tol * std::max(1.0, f.max_abs_coeff());
  while (kmin <= d && ScalarOps<S>::abs_approx(c[kmin]) <= cut) ++kmin;
  while (kmax >= 0 && ScalarOps<S>::abs_approx(c[kmax]) <= cut) --kmax;
  if (kmin > kmax) throw NumericFailure("binary form is numerically zero");

  BinaryFactorization<S> out;
  out.constant = c[kmax];
  LinearForm<S> x_form{group_id, {ScalarOps<S>::one(), ScalarOps<S>::zero()}};
  LinearForm<S> y_form{group_id, {ScalarOps<S>::zero(), ScalarOps<S>::one()}};
  for (int k = 0; k < kmin; ++k) out.forms.push_back(x_form);
  for (int k = kmax; k < d; ++k) out.forms.push_back(y_form);

  int m = kmax - kmin;
  if (m > 0) {
    std::vector<S> roots;
    bool have_roots = false;
    if constexpr (ScalarOps<S>::exact) {
      std::vector<ExactScalar> cc(c.begin() + kmin, c.begin() + kmax + 1);
      auto exact_roots = exact_poly_roots(cc);
      if (exact_roots) {
        roots = *exact_roots;
        have_roots = true;
      }
    }
    if (!have_roots) {
      std::vector<FloatScalar> cc;
      for (int k = kmin; k <= kmax; ++k)
        cc.push_back(ScalarOps<S>::to_complex(c[k]));
      auto froots = float_poly_roots(cc);
      if constexpr (ScalarOps<S>::exact) {
        // exact input whose roots leave the Gaussian rationals: report the
        // numeric fallback through the flag, coefficients stay approximate
        return std::nullopt;
      } else {
        for (auto r : froots) roots.push_back(r);
        out.numeric = true;
        have_roots = true;
      }
    }
    for (const S& r : roots) {
      LinearForm<S> form{group_id, {ScalarOps<S>::one(), -r}};
      out.forms.push_back(form.normalized());
    }
  }

  // reconstruction check
  MultiPoly<S> prod = MultiPoly<S>::constant(sig, out.constant);
  for (const auto& form : out.forms) prod = prod * form.to_poly(sig);
  if (!poly_eq(prod, f, std::sqrt(tol))) return std::nullopt;

  for (auto& form : out.forms) form = form.normalized();
  std::sort(out.forms.begin(), out.forms.end(),
            [](const LinearForm<S>& a, const LinearForm<S>& b) {
              return a.to_string() < b.to_string();
            });
  return out;
}

template <class S>
LinearFormsResult<S> linear_forms_test(const MultiPoly<S>& f, int group_id,
                                       uint64_t seed, double tol) {
  if (f.is_zero()) throw InvalidInput("cannot factor the zero polynomial");
  check_single_group(f, group_id);
  const Signature& sig = f.signature();
  int n = signature_var_count(sig, group_id);
  size_t off = signature_offset(sig, group_id);
  int d = f.group_degree(group_id);
  LinearFormsResult<S> out;

  if (f.term_count() == 1) {
    // monomial: coordinate hyperplanes with multiplicity
    const auto& [e, cvalue] = *f.terms().begin();
    for (int i = 0; i < n; ++i)
      for (uint16_t k = 0; k < e[off + i]; ++k) {
        LinearForm<S> form{group_id, std::vector<S>(n, ScalarOps<S>::zero())};
        form.coeffs[i] = ScalarOps<S>::one();
        out.forms.push_back(form);
      }
    out.outcome = LinearFormsOutcome::ProductOfLinearForms;
    return out;
  }

  // numeric deflation; exact inputs are decided numerically and flagged
  Rng rng(seed);
  MultiPoly<FloatScalar> w(sig);
  for (const auto& [e, cvalue] : f.terms())
    w.add_term(e, ScalarOps<S>::to_complex(cvalue));
  double scale = std::max(1.0, w.max_abs_coeff());
  std::vector<LinearForm<FloatScalar>> found;

  size_t nvars = signature_total_vars(sig);
  for (int step = 0; step < d; ++step) {
    int dw = w.group_degree(group_id);
    if (dw == 0) break;
    bool peeled = false;
    bool saw_ambiguous = false;
    for (int attempt = 0; attempt < 8 && !peeled; ++attempt) {
      // root of w restricted to a random line z0 + t z1
      std::vector<FloatScalar> z0(nvars, FloatScalar(0, 0)),
          z1(nvars, FloatScalar(0, 0));
      for (int i = 0; i < n; ++i) {
        z0[off + i] = FloatScalar(rng.gaussian(), rng.gaussian());
        z1[off + i] = FloatScalar(rng.gaussian(), rng.gaussian());
      }
      std::vector<FloatScalar> pc(dw + 1, FloatScalar(0, 0));
      {
        // interpolate w(z0 + t z1) at dw+1 nodes
        Eigen::MatrixXcd v(dw + 1, dw + 1);
        Eigen::VectorXcd rhs(dw + 1);
        for (int row = 0; row <= dw; ++row) {
          double theta = 2.0 * M_PI * row / (dw + 1);
          FloatScalar t(std::cos(theta) * 1.3, std::sin(theta) * 1.3);
          std::vector<FloatScalar> z(nvars);
          for (size_t i = 0; i < nvars; ++i) z[i] = z0[i] + t * z1[i];
          rhs(row) = w.evaluate(z);
          FloatScalar pw(1, 0);
          for (int col = 0; col <= dw; ++col) {
            v(row, col) = pw;
            pw *= t;
          }
        }
        Eigen::VectorXcd sol = v.fullPivLu().solve(rhs);
        for (int k = 0; k <= dw; ++k) pc[k] = sol(k);
      }
      auto roots = float_poly_roots(pc);
      if (roots.empty()) continue;
      // favor well separated (simple) roots
      std::sort(roots.begin(), roots.end(), [&](FloatScalar a, FloatScalar b) {
        return std::abs(a) < std::abs(b);
      });
      for (const auto& t : roots) {
        std::vector<FloatScalar> z(nvars);
        for (size_t i = 0; i < nvars; ++i) z[i] = z0[i] + t * z1[i];
        LinearForm<FloatScalar> cand{group_id,
                                     std::vector<FloatScalar>(n, {0, 0})};
        double gnorm = 0;
        for (int i = 0; i < n; ++i) {
          cand.coeffs[i] = partial_eval(w, off + i, z);
          gnorm += std::norm(cand.coeffs[i]);
        }
        if (gnorm < 1e-18) continue;  // singular point, try another root
        double inv = 1.0 / std::sqrt(gnorm);
        for (auto& x : cand.coeffs) x *= inv;
        auto quotient = divide_exact(w, cand.to_poly(sig), tol);
        if (quotient) {
          w = *quotient;
          found.push_back(cand.normalized());
          peeled = true;
          break;
        }
        if (divide_exact(w, cand.to_poly(sig), std::sqrt(tol)))
          saw_ambiguous = true;
      }
    }
    if (!peeled) {
      out.outcome = saw_ambiguous ? LinearFormsOutcome::Undecided
                                  : LinearFormsOutcome::Not;
      out.note = saw_ambiguous ? "division residual in the ambiguous band"
                               : "no tangent hyperplane divides the form";
      return out;
    }
  }

  // w is down to a constant; re-expand and compare against the input
  FloatScalar lead(1, 0);
  if (!w.is_zero() && w.term_count() == 1 &&
      w.group_degree(group_id) == 0)
    lead = w.terms().begin()->second;
  MultiPoly<FloatScalar> prod = MultiPoly<FloatScalar>::constant(sig, lead);
  for (const auto& form : found) prod = prod * form.to_poly(sig);
  MultiPoly<FloatScalar> wf(sig);
  for (const auto& [e, cvalue] : f.terms())
    wf.add_term(e, ScalarOps<S>::to_complex(cvalue));
  if (!poly_eq(prod, wf, std::sqrt(tol))) {
    out.outcome = LinearFormsOutcome::Undecided;
    out.note = "deflation product does not reconstruct the form";
    return out;
  }
  (void)scale;
  out.outcome = LinearFormsOutcome::ProductOfLinearForms;
  if constexpr (ScalarOps<S>::exact) {
    // exact callers learn the outcome; the numerically found forms stay out
    // of exact results
    out.note = "factors obtained numerically";
  } else {
    out.forms.reserve(found.size());
    for (const auto& form : found) out.forms.push_back(form.normalized());
    std::sort(out.forms.begin(), out.forms.end(),
              [](const LinearForm<S>& a, const LinearForm<S>& b) {
                return a.to_string() < b.to_string();
              });
  }
  return out;
}

template <class S>
Matrix<S> bilinear_coeff_matrix(const MultiPoly<S>& f) {
  const Signature& sig = f.signature();
  if (sig.size() != 2 || sig[0].var_count != 2 || sig[1].var_count != 2)
    throw InvalidInput("expected a form over two 2-variable groups");
  Matrix<S> c(2, 2);
  for (const auto& [e, v] : f.terms()) {
    if (e[0] + e[1] != 1 || e[2] + e[3] != 1)
      throw InvalidInput("expected a (1,1) form");
    c(e[0] ? 0 : 1, e[2] ? 0 : 1) = v;
  }
  return c;
}

template <>
std::optional<std::vector<BilinearFactor<ExactScalar>>>
bilinear_factors_numeric(const MultiPoly<ExactScalar>&, uint64_t, double) {
  return std::nullopt;  // numeric deflation serves the float pipeline
}

template <>
std::optional<std::vector<BilinearFactor<FloatScalar>>>
bilinear_factors_numeric(const MultiPoly<FloatScalar>& f, uint64_t seed,
                         double tol) {
  const Signature& sig = f.signature();
  if (sig.size() != 2 || sig[0].var_count != 2 || sig[1].var_count != 2)
    return std::nullopt;
  auto deg = f.multidegree();
  if (deg[0] != deg[1] || deg[0] == 0) return std::nullopt;
  int d = deg[0];
  int gid0 = sig[0].id;
  Rng rng(seed);
  MultiPoly<FloatScalar> w = f;
  std::vector<BilinearFactor<FloatScalar>> out;

  for (int step = 0; step < d; ++step) {
    bool peeled = false;
    for (int attempt = 0; attempt < 12 && !peeled; ++attempt) {
      FloatScalar v0(rng.gaussian(), rng.gaussian()),
          v1(rng.gaussian(), rng.gaussian());
      // w(u, v*) as a binary form in u
      int dw = w.group_degree(gid0);
      std::vector<FloatScalar> c(dw + 1, FloatScalar(0, 0));
      for (const auto& [e, coeff] : w.terms()) {
        FloatScalar t = coeff;
        for (int k = 0; k < e[2]; ++k) t *= v0;
        for (int k = 0; k < e[3]; ++k) t *= v1;
        c[e[0]] += t;
      }
      auto roots = float_poly_roots(c);
      std::vector<std::pair<FloatScalar, FloatScalar>> upoints;
      for (auto r : roots) upoints.push_back({r, FloatScalar(1, 0)});
      if (static_cast<int>(roots.size()) < dw)
        upoints.push_back({FloatScalar(1, 0), FloatScalar(0, 0)});  // root at infinity
      for (auto [u0, u1] : upoints) {
        std::vector<FloatScalar> z{u0, u1, v0, v1};
        // solve for the (1,1) form through z with matching gradient
        Eigen::MatrixXcd a = Eigen::MatrixXcd::Zero(4, 5);
        a(0, 0) = v0; a(0, 1) = v1; a(0, 4) = -partial_eval(w, 0, z);
        a(1, 2) = v0; a(1, 3) = v1; a(1, 4) = -partial_eval(w, 1, z);
        a(2, 0) = u0; a(2, 2) = u1; a(2, 4) = -partial_eval(w, 2, z);
        a(3, 1) = u0; a(3, 3) = u1; a(3, 4) = -partial_eval(w, 3, z);
        Eigen::JacobiSVD<Eigen::MatrixXcd> svd(a, Eigen::ComputeFullV);
        Eigen::VectorXcd x = svd.matrixV().col(4);
        MultiPoly<FloatScalar> cand(sig);
        ExpVec e(4, 0);
        const int pos[4][2] = {{0, 2}, {0, 3}, {1, 2}, {1, 3}};
        double cn = 0;
        for (int k = 0; k < 4; ++k) cn += std::norm(x(k));
        if (cn < 1e-18) continue;
        for (int k = 0; k < 4; ++k) {
          std::fill(e.begin(), e.end(), 0);
          e[pos[k][0]] = 1;
          e[pos[k][1]] = 1;
          cand.add_term(e, x(k) / std::sqrt(cn));
        }
        if (cand.is_zero()) continue;
        auto quotient = divide_exact(w, cand, tol);
        if (!quotient) continue;
        w = *quotient;
        BilinearFactor<FloatScalar> bf;
        bf.poly = cand.normalized();
        bf.coeff_matrix = bilinear_coeff_matrix(bf.poly);
        bf.det = matrix_det(bf.coeff_matrix);
        out.push_back(std::move(bf));
        peeled = true;
        break;
      }
    }
    if (!peeled) return std::nullopt;
  }
  // residual must be a constant now
  if (w.group_degree(sig[0].id) != 0 || w.group_degree(sig[1].id) != 0)
    return std::nullopt;
  return out;
}

#define EV_INSTANTIATE_POLYFACTOR(S)                                        \
  template struct LinearForm<S>;                                            \
  template GroupSeparableResult<S> group_separable_factor(                  \
      const MultiPoly<S>&, double);                                         \
  template std::optional<BinaryFactorization<S>> binary_linear_factors(     \
      const MultiPoly<S>&, int, double);                                    \
  template LinearFormsResult<S> linear_forms_test(const MultiPoly<S>&, int, \
                                                  uint64_t, double);        \
  template Matrix<S> bilinear_coeff_matrix(const MultiPoly<S>&);

EV_INSTANTIATE_POLYFACTOR(ExactScalar)
EV_INSTANTIATE_POLYFACTOR(FloatScalar)
#undef EV_INSTANTIATE_POLYFACTOR

}  // namespace ev
