#pragma once

#include <cstdint>
#include <string>
#include <utility>
#include <vector>

#include "superns/rational.hpp"

namespace superns {

enum class Branch : int { plus = 1, minus = -1 };

inline int sign_of(Branch b) { return static_cast<int>(b); }
inline Branch flip(Branch b) { return b == Branch::plus ? Branch::minus : Branch::plus; }
Branch parse_branch(const std::string& s);
std::string to_string(Branch b);

// Generator i (1-based) is bit i-1 of the mask.
using Mask = std::uint64_t;

inline int mask_degree(Mask m) { return __builtin_popcountll(m); }

// Sign of ζ_{m1} ζ_{m2} relative to the sorted monomial ζ_{m1|m2}; 0 if they overlap.
int mask_product_sign(Mask m1, Mask m2);

// Element of the Grassmann algebra on L generators with exact complex
// rational coefficients. Terms are kept sorted by mask, without zeros.
class Grassmann {
 public:
  using Term = std::pair<Mask, CRational>;

  explicit Grassmann(int generators = 0) : L_(generators) {}

  static Grassmann scalar(const CRational& c, int generators);
  static Grassmann generator(int index, int generators);
  static Grassmann monomial(Mask m, const CRational& c, int generators);

  int generators() const { return L_; }
  const std::vector<Term>& terms() const { return terms_; }

  bool is_zero() const { return terms_.empty(); }
  bool is_scalar() const { return terms_.empty() || (terms_.size() == 1 && terms_[0].first == 0); }
  CRational body() const;
  Grassmann soul() const;
  CRational coefficient(Mask m) const;

  bool is_even() const;
  bool is_odd() const;
  Grassmann even_part() const;
  Grassmann odd_part() const;
  // a_even - a_odd; realizes a·θ = θ·involute(a) for odd θ.
  Grassmann involute() const;
  // Lowest degree among terms (L+1 for zero).
  int min_degree() const;

  void add_term(Mask m, const CRational& c);
  Grassmann with_generators(int generators) const;

  Grassmann& operator+=(const Grassmann& o);
  Grassmann& operator-=(const Grassmann& o);
  Grassmann& operator*=(const CRational& c);
  Grassmann operator-() const;

  friend Grassmann operator*(const Grassmann& a, const Grassmann& b);
  friend bool operator==(const Grassmann& a, const Grassmann& b) {
    return a.L_ == b.L_ && a.terms_ == b.terms_;
  }
  friend bool operator!=(const Grassmann& a, const Grassmann& b) { return !(a == b); }

 private:
  int L_;
  std::vector<Term> terms_;
};

inline Grassmann operator+(Grassmann a, const Grassmann& b) { return a += b; }
inline Grassmann operator-(Grassmann a, const Grassmann& b) { return a -= b; }
inline Grassmann operator*(Grassmann a, const CRational& c) { return a *= c; }
inline Grassmann operator*(const CRational& c, Grassmann a) { return a *= c; }

Grassmann gr_mul(const Grassmann& a, const Grassmann& b);
std::pair<CRational, Grassmann> gr_split(const Grassmann& a);
Grassmann gr_inverse(const Grassmann& a);
Grassmann gr_sqrt(const Grassmann& a, Branch branch);
// a^n for integer n; negative n requires invertible body.
Grassmann gr_pow(const Grassmann& a, long n);
// a^(k/2) using gr_sqrt(a, branch) for odd k.
Grassmann gr_half_pow(const Grassmann& a, long k, Branch branch);

std::string to_string(const Grassmann& a);
inline std::ostream& operator<<(std::ostream& os, const Grassmann& a) { return os << to_string(a); }

}  // namespace superns
