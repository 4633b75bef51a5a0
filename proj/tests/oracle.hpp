// Test-side oracles, deliberately independent of the library code paths they
// check: plain complex arrays for state algebra and a dense map-based
// polynomial expander for symbolic identities.

#pragma once

#include <array>
#include <complex>
#include <map>
#include <vector>

namespace oracle {

using Cplx = std::complex<double>;
using CVec = std::vector<Cplx>;
using CMat = std::vector<std::vector<Cplx>>;

inline CVec kron_vec(const CVec& a, const CVec& b) {
  CVec out(a.size() * b.size());
  for (size_t i = 0; i < a.size(); ++i)
    for (size_t j = 0; j < b.size(); ++j) out[i * b.size() + j] = a[i] * b[j];
  return out;
}

inline CMat outer(const CVec& v) {
  CMat out(v.size(), CVec(v.size()));
  for (size_t i = 0; i < v.size(); ++i)
    for (size_t j = 0; j < v.size(); ++j) out[i][j] = v[i] * std::conj(v[j]);
  return out;
}

inline void add_scaled(CMat& acc, const CMat& m, double w) {
  for (size_t i = 0; i < m.size(); ++i)
    for (size_t j = 0; j < m.size(); ++j) acc[i][j] += w * m[i][j];
}

// the four Bell vectors on two qubits, unit normalized
inline CVec bell(int which) {
  double s = 1.0 / std::sqrt(2.0);
  switch (which) {
    case 0: return {s, 0, 0, s};
    case 1: return {s, 0, 0, -s};
    case 2: return {0, s, s, 0};
    default: return {0, s, -s, 0};
  }
}

// the rank-4 four-qubit mixture of Bell products, assembled entrywise
inline CMat smolin_rho() {
  CMat rho(16, CVec(16, Cplx(0, 0)));
  for (int w = 0; w < 4; ++w) {
    CVec v = kron_vec(bell(w), bell(w));
    add_scaled(rho, outer(v), 0.25);
  }
  return rho;
}

// dense polynomial over arbitrarily many variables: exponent vector -> coeff
using Poly = std::map<std::vector<int>, Cplx>;

inline Poly pmono(std::vector<int> e, Cplx c) { return {{std::move(e), c}}; }

inline Poly padd(const Poly& a, const Poly& b) {
  Poly out = a;
  for (const auto& [e, c] : b) {
    out[e] += c;
    if (std::abs(out[e]) < 1e-13) out.erase(e);
  }
  return out;
}

inline Poly pmul(const Poly& a, const Poly& b) {
  Poly out;
  for (const auto& [ea, ca] : a)
    for (const auto& [eb, cb] : b) {
      std::vector<int> e(ea.size());
      for (size_t i = 0; i < e.size(); ++i) e[i] = ea[i] + eb[i];
      out[e] += ca * cb;
    }
  for (auto it = out.begin(); it != out.end();)
    it = std::abs(it->second) < 1e-13 ? out.erase(it) : std::next(it);
  return out;
}

}  // namespace oracle
