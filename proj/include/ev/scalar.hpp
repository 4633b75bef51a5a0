// Exact and floating-point complex scalars shared by the whole pipeline.
// A computation runs in one scalar mode end to end; the two modes are
// distinct template instantiations, so mixing them cannot compile.

#pragma once

#include <gmpxx.h>

#include <complex>
#include <optional>
#include <stdexcept>
#include <string>

namespace ev {

using Rational = mpq_class;

// Input that cannot be parsed or violates a precondition. CLI exit code 2.
struct InvalidInput : std::runtime_error {
  using std::runtime_error::runtime_error;
};

// Numeric routine failed to certify a result. CLI exit code 3.
struct NumericFailure : std::runtime_error {
  using std::runtime_error::runtime_error;
};

struct UnsupportedExactDecomposition : InvalidInput {
  using InvalidInput::InvalidInput;
};

// "p/q", "p", or a plain decimal like "-0.25" (lossless scaling by 10^k).
Rational rational_from_string(const std::string& s);
std::string rational_to_string(const Rational& q);

bool rational_is_perfect_square(const Rational& q);
Rational rational_sqrt(const Rational& q);  // pre: perfect square, q >= 0

// Complex number with exact rational real and imaginary parts.
struct ExactScalar {
  Rational re, im;

  ExactScalar() : re(0), im(0) {}
  ExactScalar(long r) : re(r), im(0) {}
  ExactScalar(Rational r) : re(std::move(r)), im(0) {}
  ExactScalar(Rational r, Rational i) : re(std::move(r)), im(std::move(i)) {}

  friend ExactScalar operator+(const ExactScalar& a, const ExactScalar& b) {
    return {a.re + b.re, a.im + b.im};
  }
  friend ExactScalar operator-(const ExactScalar& a, const ExactScalar& b) {
    return {a.re - b.re, a.im - b.im};
  }
  friend ExactScalar operator-(const ExactScalar& a) { return {-a.re, -a.im}; }
  friend ExactScalar operator*(const ExactScalar& a, const ExactScalar& b) {
    return {a.re * b.re - a.im * b.im, a.re * b.im + a.im * b.re};
  }
  friend ExactScalar operator/(const ExactScalar& a, const ExactScalar& b) {
    Rational n = b.re * b.re + b.im * b.im;
    if (n == 0) throw InvalidInput("division by zero");
    return {(a.re * b.re + a.im * b.im) / n, (a.im * b.re - a.re * b.im) / n};
  }
  ExactScalar& operator+=(const ExactScalar& b) { return *this = *this + b; }
  ExactScalar& operator-=(const ExactScalar& b) { return *this = *this - b; }
  ExactScalar& operator*=(const ExactScalar& b) { return *this = *this * b; }
  friend bool operator==(const ExactScalar& a, const ExactScalar& b) {
    return a.re == b.re && a.im == b.im;
  }
  friend bool operator!=(const ExactScalar& a, const ExactScalar& b) {
    return !(a == b);
  }

  Rational norm2() const { return re * re + im * im; }
  bool is_zero() const { return re == 0 && im == 0; }
};

inline ExactScalar conj(const ExactScalar& a) { return {a.re, -a.im}; }

// Square root within the Gaussian rationals, when one exists.
std::optional<ExactScalar> exact_complex_sqrt(const ExactScalar& z);

using FloatScalar = std::complex<double>;

constexpr double kDefaultTol = 1e-9;

// Uniform interface over the two scalar modes.
template <class S>
struct ScalarOps;

template <>
struct ScalarOps<ExactScalar> {
  static constexpr bool exact = true;
  using Real = Rational;
  static ExactScalar zero() { return {}; }
  static ExactScalar one() { return ExactScalar(1); }
  static ExactScalar imag_unit() { return {Rational(0), Rational(1)}; }
  static ExactScalar from_int(long v) { return ExactScalar(v); }
  static ExactScalar from_real(const Real& r) { return ExactScalar(r); }
  static Real real_zero() { return Rational(0); }
  static Real real_one() { return Rational(1); }
  static bool is_zero(const ExactScalar& a, double /*tol*/ = 0) {
    return a.is_zero();
  }
  static bool eq(const ExactScalar& a, const ExactScalar& b,
                 double /*tol*/ = 0) {
    return a == b;
  }
  static ExactScalar conj(const ExactScalar& a) { return ev::conj(a); }
  static double abs_approx(const ExactScalar& a) {
    return std::sqrt(a.norm2().get_d());
  }
  static FloatScalar to_complex(const ExactScalar& a) {
    return {a.re.get_d(), a.im.get_d()};
  }
};

template <>
struct ScalarOps<FloatScalar> {
  static constexpr bool exact = false;
  using Real = double;
  static FloatScalar zero() { return {0.0, 0.0}; }
  static FloatScalar one() { return {1.0, 0.0}; }
  static FloatScalar imag_unit() { return {0.0, 1.0}; }
  static FloatScalar from_int(long v) {
    return {static_cast<double>(v), 0.0};
  }
  static FloatScalar from_real(double r) { return {r, 0.0}; }
  static double real_zero() { return 0.0; }
  static double real_one() { return 1.0; }
  static bool is_zero(const FloatScalar& a, double tol = kDefaultTol) {
    return std::abs(a) <= tol;
  }
  static bool eq(const FloatScalar& a, const FloatScalar& b,
                 double tol = kDefaultTol) {
    return std::abs(a - b) <= tol;
  }
  static FloatScalar conj(const FloatScalar& a) { return std::conj(a); }
  static double abs_approx(const FloatScalar& a) { return std::abs(a); }
  static FloatScalar to_complex(const FloatScalar& a) { return a; }
};

std::string scalar_to_string(const ExactScalar& a);
std::string scalar_to_string(const FloatScalar& a);

}  // namespace ev
