#pragma once

#include <array>
#include <climits>
#include <map>
#include <memory>
#include <string>
#include <vector>

#include "superns/grassmann.hpp"

namespace superns {

constexpr int kMaxSymbols = 48;

struct Symbol {
  std::string name;
  bool odd = false;
  int weight = 1;  // contribution to total degree; 0 for c, h
};

class SymbolTable {
 public:
  SymbolTable() = default;
  explicit SymbolTable(std::vector<Symbol> symbols);

  int size() const { return static_cast<int>(symbols_.size()); }
  const Symbol& operator[](int i) const { return symbols_[i]; }
  const std::vector<Symbol>& symbols() const { return symbols_; }
  // -1 if absent
  int find(const std::string& name) const;
  int index(const std::string& name) const;  // throws SchemaError
  Mask odd_mask() const { return odd_mask_; }

  bool operator==(const SymbolTable& o) const;

 private:
  std::vector<Symbol> symbols_;
  Mask odd_mask_ = 0;
};

using SymbolTablePtr = std::shared_ptr<const SymbolTable>;

// Monomial in the table's symbols times α₀^{alpha2/2}.
struct Monomial {
  std::array<std::uint8_t, kMaxSymbols> exp{};
  Mask odd = 0;  // odd symbols present
  int alpha2 = 0;

  bool operator<(const Monomial& o) const {
    if (alpha2 != o.alpha2) return alpha2 < o.alpha2;
    return exp < o.exp;
  }
  bool operator==(const Monomial& o) const { return alpha2 == o.alpha2 && exp == o.exp; }
  bool is_odd() const { return mask_degree(odd) % 2 == 1; }
};

// Truncated polynomial over formal even/odd symbols with half-integer
// Laurent exponents of α₀. Terms of total degree > cap are dropped.
class GradedPoly {
 public:
  static constexpr int kNoCap = INT_MAX;

  GradedPoly() = default;
  explicit GradedPoly(SymbolTablePtr table, int cap = kNoCap) : table_(std::move(table)), cap_(cap) {}

  static GradedPoly constant(SymbolTablePtr table, const CRational& c, int cap = kNoCap);
  static GradedPoly symbol(SymbolTablePtr table, const std::string& name, int cap = kNoCap);
  static GradedPoly symbol(SymbolTablePtr table, int index, int cap = kNoCap);
  static GradedPoly alpha_power(SymbolTablePtr table, int alpha2, int cap = kNoCap);

  const SymbolTablePtr& table() const { return table_; }
  int cap() const { return cap_; }
  const std::map<Monomial, CRational>& terms() const { return terms_; }

  bool is_zero() const { return terms_.empty(); }
  bool is_even() const;
  bool is_odd() const;
  int degree(const Monomial& m) const;
  // Smallest total degree present (kNoCap for zero).
  int min_degree() const;
  bool mentions(int symbol) const;

  void add_term(const Monomial& m, const CRational& c);
  GradedPoly truncated(int cap) const;
  GradedPoly with_cap(int cap) const;
  GradedPoly degree_part(int d) const;
  GradedPoly involute() const;
  // Replace an even weight-0 symbol by a number.
  GradedPoly specialize(int symbol, const CRational& value) const;

  GradedPoly& operator+=(const GradedPoly& o);
  GradedPoly& operator-=(const GradedPoly& o);
  GradedPoly& operator*=(const CRational& c);
  GradedPoly operator-() const;

  friend bool operator==(const GradedPoly& a, const GradedPoly& b) { return a.terms_ == b.terms_; }
  friend bool operator!=(const GradedPoly& a, const GradedPoly& b) { return !(a == b); }

 private:
  SymbolTablePtr table_;
  int cap_ = kNoCap;
  std::map<Monomial, CRational> terms_;
};

inline GradedPoly operator+(GradedPoly a, const GradedPoly& b) { return a += b; }
inline GradedPoly operator-(GradedPoly a, const GradedPoly& b) { return a -= b; }
inline GradedPoly operator*(GradedPoly a, const CRational& c) { return a *= c; }
inline GradedPoly operator*(const CRational& c, GradedPoly a) { return a *= c; }
GradedPoly operator*(const GradedPoly& a, const GradedPoly& b);

GradedPoly poly_mul(const GradedPoly& p, const GradedPoly& q);

// Sign of m1·m2 against the canonical order, 0 if an odd symbol repeats.
int monomial_product(const Monomial& m1, const Monomial& m2, Monomial& out);

// Substitute Grassmann values for every symbol mentioned and α₀ = alpha
// (half powers through gr_sqrt with the given branch).
struct PolyValues {
  std::vector<Grassmann> symbols;  // indexed like the table; unused entries may be empty
  Grassmann alpha;
  Branch branch = Branch::plus;
  int generators = 0;
};
Grassmann evaluate(const GradedPoly& p, const PolyValues& values);

std::string to_string(const GradedPoly& p);
inline std::ostream& operator<<(std::ostream& os, const GradedPoly& p) { return os << to_string(p); }
std::string monomial_string(const SymbolTable& table, const Monomial& m);

}  // namespace superns
