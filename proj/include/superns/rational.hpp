#pragma once

#include <gmpxx.h>

#include <optional>
#include <ostream>
#include <string>

namespace superns {

using Rational = mpq_class;

// n/d in canonical form (mpq_class(n, d) does not canonicalize).
inline Rational frac(long n, long d) {
  Rational q(n, d);
  q.canonicalize();
  return q;
}

Rational parse_rational(const std::string& s);
std::string to_string(const Rational& q);

// Exact complex rational re + i*im.
struct CRational {
  Rational re;
  Rational im;

  CRational() = default;
  CRational(long v) : re(v), im(0) {}
  CRational(Rational r) : re(std::move(r)), im(0) {}
  CRational(Rational r, Rational i) : re(std::move(r)), im(std::move(i)) {}

  static CRational i() { return {Rational(0), Rational(1)}; }

  bool is_zero() const { return sgn(re) == 0 && sgn(im) == 0; }
  bool is_real() const { return sgn(im) == 0; }

  CRational& operator+=(const CRational& o) {
    re += o.re;
    if (sgn(o.im) != 0) im += o.im;
    return *this;
  }
  CRational& operator-=(const CRational& o) {
    re -= o.re;
    if (sgn(o.im) != 0) im -= o.im;
    return *this;
  }
  CRational& operator*=(const CRational& o);
  CRational& operator/=(const CRational& o);

  CRational operator-() const { return {-re, -im}; }
  CRational conj() const { return {re, -im}; }
};

inline CRational operator+(CRational a, const CRational& b) { return a += b; }
inline CRational operator-(CRational a, const CRational& b) { return a -= b; }
inline CRational operator*(CRational a, const CRational& b) { return a *= b; }
inline CRational operator/(CRational a, const CRational& b) { return a /= b; }
inline bool operator==(const CRational& a, const CRational& b) {
  return a.re == b.re && a.im == b.im;
}
inline bool operator!=(const CRational& a, const CRational& b) { return !(a == b); }

CRational pow(const CRational& a, long n);
CRational inverse(const CRational& a);

// Nonnegative rational with a rational square root.
std::optional<Rational> exact_sqrt(const Rational& q);

// Principal square root (Re > 0, or Re = 0 and Im >= 0). Throws DomainError
// when the root is not in Q(i).
CRational principal_sqrt(const CRational& a);

std::string to_string(const CRational& c);
// Decimal rendering for human output only.
std::string to_decimal_string(const CRational& c, int digits = 8);
std::ostream& operator<<(std::ostream& os, const CRational& c);

}  // namespace superns
