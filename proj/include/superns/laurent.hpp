#pragma once

#include <climits>
#include <map>
#include <string>

#include "superns/grassmann.hpp"

namespace superns {

struct Window {
  int lo = -12;
  int hi = 12;
  bool operator==(const Window&) const = default;
};

// Where a truncated series is expanded. At zero, exponents >= prec are
// unknown; at infinity, exponents <= prec are unknown.
enum class Side { exact, zero, infinity };

// Laurent series in z with Grassmann coefficients, restricted to a window.
class Laurent {
 public:
  Laurent() = default;
  Laurent(int generators, Window window) : L_(generators), window_(window) {}

  static Laurent monomial(const Grassmann& c, int n, Window window);
  static Laurent constant(const Grassmann& c, Window window) { return monomial(c, 0, window); }

  int generators() const { return L_; }
  const Window& window() const { return window_; }
  Side side() const { return side_; }
  int prec() const { return prec_; }
  const std::map<int, Grassmann>& terms() const { return terms_; }

  bool is_exact() const { return side_ == Side::exact; }
  // No known nonzero coefficient (the unknown tail may be anything).
  bool known_zero() const { return terms_.empty(); }
  Grassmann coefficient(int n) const;
  bool known(int n) const;
  int min_exponent() const;  // INT_MAX if empty
  int max_exponent() const;  // INT_MIN if empty

  void set(int n, const Grassmann& c);
  void add(int n, const Grassmann& c);
  // Declare everything from prec on (zero) or up to prec (infinity) unknown.
  void truncate(Side side, int prec);
  Laurent with_window(Window w) const;
  // Apply the window: drop terms in the unknown region, adjust precision,
  // throw TruncationError when known terms fall on the wrong side.
  void clamp();

  Laurent involute() const;
  Laurent derivative() const;
  bool is_even() const;
  bool is_odd() const;

  Laurent& operator+=(const Laurent& o);
  Laurent& operator-=(const Laurent& o);
  Laurent operator-() const;

  friend Laurent operator*(const Laurent& a, const Laurent& b);
  friend Laurent operator*(const Grassmann& c, const Laurent& a);
  friend Laurent operator*(const Laurent& a, const Grassmann& c);

 private:
  int L_ = 0;
  Window window_;
  Side side_ = Side::exact;
  int prec_ = 0;
  std::map<int, Grassmann> terms_;
};

inline Laurent operator+(Laurent a, const Laurent& b) { return a += b; }
inline Laurent operator-(Laurent a, const Laurent& b) { return a -= b; }

// z^k · a, with the window shifted along.
Laurent shift(const Laurent& a, int k);
// 1/a, expanded around the leading invertible term in the series' own orientation.
Laurent inverse(const Laurent& a);
Laurent pow(const Laurent& a, long n);
// a^{1/2} for even-valued a with invertible leading term of even exponent.
Laurent sqrt(const Laurent& a, Branch branch);
// F(g) for even-valued g.
Laurent compose(const Laurent& F, const Laurent& g);
// Σ F_n x^n at a Grassmann value, finite by truncation.
Grassmann evaluate(const Laurent& F, const Grassmann& x);

std::string to_string(const Laurent& a);

}  // namespace superns
