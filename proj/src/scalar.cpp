#include "ev/scalar.hpp"

#include <cctype>
#include <cstdio>
#include <sstream>

namespace ev {

Rational rational_from_string(const std::string& s) {
  std::string t;
  for (char c : s)
    if (!std::isspace(static_cast<unsigned char>(c))) t.push_back(c);
  if (t.empty()) throw InvalidInput("empty rational literal");

  auto dot = t.find('.');
  auto exp = t.find_first_of("eE");
  if (dot != std::string::npos || exp != std::string::npos) {
    // decimal form: scale mantissa by a power of ten
    std::string mant = t;
    long e10 = 0;
    if (exp != std::string::npos) {
      e10 = std::stol(t.substr(exp + 1));
      mant = t.substr(0, exp);
      dot = mant.find('.');
    }
    if (dot != std::string::npos) {
      e10 -= static_cast<long>(mant.size() - dot - 1);
      mant.erase(dot, 1);
    }
    if (mant.empty() || mant == "-" || mant == "+")
      throw InvalidInput("bad decimal literal: " + s);
    mpz_class num(mant, 10);
    mpz_class p10;
    mpz_ui_pow_ui(p10.get_mpz_t(), 10, static_cast<unsigned long>(std::abs(e10)));
    Rational q;
    if (e10 >= 0)
      q = Rational(num * p10);
    else
      q = Rational(num, p10);
    q.canonicalize();
    return q;
  }

  Rational q;
  if (q.set_str(t, 10) != 0) throw InvalidInput("bad rational literal: " + s);
  if (q.get_den() == 0) throw InvalidInput("zero denominator: " + s);
  q.canonicalize();
  return q;
}

std::string rational_to_string(const Rational& q) {
  return q.get_str();
}

bool rational_is_perfect_square(const Rational& q) {
  if (q < 0) return false;
  return mpz_perfect_square_p(q.get_num().get_mpz_t()) &&
         mpz_perfect_square_p(q.get_den().get_mpz_t());
}

Rational rational_sqrt(const Rational& q) {
  mpz_class n, d;
  mpz_sqrt(n.get_mpz_t(), q.get_num().get_mpz_t());
  mpz_sqrt(d.get_mpz_t(), q.get_den().get_mpz_t());
  return Rational(n, d);
}

std::optional<ExactScalar> exact_complex_sqrt(const ExactScalar& z) {
  // (p+qi)^2 = z  =>  p^2 - q^2 = re,  2pq = im
  if (z.im == 0) {
    if (z.re >= 0) {
      if (!rational_is_perfect_square(z.re)) return std::nullopt;
      return ExactScalar(rational_sqrt(z.re));
    }
    Rational m = -z.re;
    if (!rational_is_perfect_square(m)) return std::nullopt;
    return ExactScalar(Rational(0), rational_sqrt(m));
  }
  Rational n2 = z.norm2();
  if (!rational_is_perfect_square(n2)) return std::nullopt;
  Rational r = rational_sqrt(n2);           // |z|
  Rational p2 = (z.re + r) / 2;             // p^2
  if (!rational_is_perfect_square(p2)) return std::nullopt;
  Rational p = rational_sqrt(p2);
  if (p == 0) return std::nullopt;          // im != 0 needs p != 0
  Rational q = z.im / (2 * p);
  return ExactScalar(p, q);
}

std::string scalar_to_string(const ExactScalar& a) {
  if (a.im == 0) return rational_to_string(a.re);
  std::string im = rational_to_string(a.im);
  std::string sign = "+";
  if (!im.empty() && im[0] == '-') {
    sign = "-";
    im.erase(0, 1);
  }
  return "(" + rational_to_string(a.re) + sign + im + "i)";
}

std::string scalar_to_string(const FloatScalar& a) {
  char buf[64];
  if (a.imag() == 0.0) {
    std::snprintf(buf, sizeof buf, "%.12g", a.real());
    return buf;
  }
  char buf2[64];
  std::snprintf(buf, sizeof buf, "%.12g", a.real());
  std::snprintf(buf2, sizeof buf2, "%.12g", std::abs(a.imag()));
  return std::string("(") + buf + (a.imag() < 0 ? "-" : "+") + buf2 + "i)";
}

}  // namespace ev
