#include "superns/rational.hpp"

#include <cstdio>
#include <sstream>

#include "superns/errors.hpp"

namespace superns {

Rational parse_rational(const std::string& s) {
  if (s.empty()) throw ParseError("empty rational");
  std::string t = s;
  if (t[0] == '+') t = t.substr(1);
  Rational q;
  if (q.set_str(t, 10) != 0) throw ParseError("bad rational '" + s + "'");
  if (sgn(q.get_den()) == 0) throw ParseError("zero denominator in '" + s + "'");
  q.canonicalize();
  return q;
}

std::string to_string(const Rational& q) { return q.get_str(10); }

CRational& CRational::operator*=(const CRational& o) {
  if (is_real() && o.is_real()) {
    re *= o.re;
    return *this;
  }
  Rational r = re * o.re - im * o.im;
  Rational i = re * o.im + im * o.re;
  re = std::move(r);
  im = std::move(i);
  return *this;
}

CRational inverse(const CRational& a) {
  if (a.is_zero()) throw NotInvertibleError("division by zero");
  if (a.is_real()) return CRational(1 / a.re);
  Rational n = a.re * a.re + a.im * a.im;
  return {a.re / n, -a.im / n};
}

CRational& CRational::operator/=(const CRational& o) {
  if (o.is_real()) {
    if (sgn(o.re) == 0) throw NotInvertibleError("division by zero");
    re /= o.re;
    if (sgn(im) != 0) im /= o.re;
    return *this;
  }
  return *this *= inverse(o);
}

CRational pow(const CRational& a, long n) {
  if (n < 0) return pow(inverse(a), -n);
  CRational result(1), base = a;
  while (n > 0) {
    if (n & 1) result *= base;
    n >>= 1;
    if (n > 0) base *= base;
  }
  return result;
}

std::optional<Rational> exact_sqrt(const Rational& q) {
  if (sgn(q) < 0) return std::nullopt;
  if (!mpz_perfect_square_p(q.get_num_mpz_t()) || !mpz_perfect_square_p(q.get_den_mpz_t()))
    return std::nullopt;
  mpz_class n, d;
  mpz_sqrt(n.get_mpz_t(), q.get_num_mpz_t());
  mpz_sqrt(d.get_mpz_t(), q.get_den_mpz_t());
  return Rational(n, d);
}

CRational principal_sqrt(const CRational& a) {
  if (a.is_zero()) return CRational(0);
  if (a.is_real()) {
    if (sgn(a.re) > 0) {
      if (auto r = exact_sqrt(a.re)) return CRational(*r);
    } else if (auto r = exact_sqrt(-a.re)) {
      return {Rational(0), *r};
    }
    throw DomainError("square root of " + to_string(a) + " is not exactly representable");
  }
  // sqrt(p + qi) = x + yi with x = sqrt((|a| + p)/2) > 0, y = q/(2x)
  auto m = exact_sqrt(a.re * a.re + a.im * a.im);
  if (m) {
    auto x = exact_sqrt((*m + a.re) / 2);
    if (x && sgn(*x) != 0) return {*x, a.im / (2 * *x)};
  }
  throw DomainError("square root of " + to_string(a) + " is not exactly representable");
}

std::string to_string(const CRational& c) {
  if (c.is_real()) return to_string(c.re);
  std::string s;
  if (sgn(c.re) != 0) s = to_string(c.re) + (sgn(c.im) > 0 ? "+" : "");
  if (c.im == 1)
    s += "i";
  else if (c.im == -1)
    s += "-i";
  else
    s += to_string(c.im) + "*i";
  return s;
}

std::string to_decimal_string(const CRational& c, int digits) {
  char buf[64];
  std::ostringstream os;
  std::snprintf(buf, sizeof buf, "%.*g", digits, c.re.get_d());
  os << buf;
  if (!c.is_real()) {
    std::snprintf(buf, sizeof buf, "%+.*g", digits, c.im.get_d());
    os << buf << "i";
  }
  return os.str();
}

std::ostream& operator<<(std::ostream& os, const CRational& c) { return os << to_string(c); }

}  // namespace superns
