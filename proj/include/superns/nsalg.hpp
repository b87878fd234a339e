#pragma once

#include <compare>
#include <map>
#include <string>
#include <tuple>
#include <utility>
#include <vector>

#include "superns/graded_poly.hpp"

namespace superns {

// Basis element of the NS algebra. Mode indices are stored doubled so that
// G(n+½) is exact: L(n) has twice = 2n, G(r) has twice = 2r (odd).
struct NSGen {
  enum class Kind : std::uint8_t { L, G, C };
  Kind kind = Kind::C;
  int twice = 0;

  static NSGen L(int n) { return {Kind::L, 2 * n}; }
  static NSGen G2(int twice_r) { return {Kind::G, twice_r}; }
  static NSGen c() { return {Kind::C, 0}; }

  bool is_odd() const { return kind == Kind::G; }
  bool is_central() const { return kind == Kind::C; }
  bool is_raising() const { return kind != Kind::C && twice < 0; }
  bool is_lowering() const { return kind != Kind::C && twice > 0; }
  // Twice the L(0)-eigenvalue shift (L(−1) raises by 1).
  int weight2() const { return kind == Kind::C ? 0 : -twice; }

  auto operator<=>(const NSGen&) const = default;
};

std::string to_string(const NSGen& g);
// Parses "L(-2)", "G(3/2)", "c".
NSGen parse_nsgen(const std::string& s);

// Position in the PBW order: raising G's then raising L's (indices decreasing
// in magnitude), L(0), c, then lowering L's and G's (increasing magnitude).
std::tuple<int, int, int> pbw_rank(const NSGen& g);
bool pbw_less(const NSGen& a, const NSGen& b);

using NSTerm = std::pair<NSGen, Rational>;
// Structure constants on basis elements.
std::vector<NSTerm> ns_bracket(const NSGen& a, const NSGen& b);

class NSExpression {
 public:
  NSExpression() = default;
  explicit NSExpression(SymbolTablePtr table, int cap = GradedPoly::kNoCap) : table_(std::move(table)), cap_(cap) {}
  static NSExpression basis(SymbolTablePtr table, const NSGen& g, int cap = GradedPoly::kNoCap);

  const SymbolTablePtr& table() const { return table_; }
  int cap() const { return cap_; }
  const std::map<NSGen, GradedPoly>& terms() const { return terms_; }
  bool is_zero() const { return terms_.empty(); }
  void add(const NSGen& g, const GradedPoly& p);

  NSExpression& operator+=(const NSExpression& o);
  NSExpression& operator-=(const NSExpression& o);
  friend bool operator==(const NSExpression& a, const NSExpression& b) { return a.terms_ == b.terms_; }

 private:
  SymbolTablePtr table_;
  int cap_ = GradedPoly::kNoCap;
  std::map<NSGen, GradedPoly> terms_;
};

inline NSExpression operator+(NSExpression a, const NSExpression& b) { return a += b; }
inline NSExpression operator-(NSExpression a, const NSExpression& b) { return a -= b; }
NSExpression operator*(const GradedPoly& p, const NSExpression& x);
// Bilinear superbracket, [pX, qY] = p (−1)^{|X||q|} q [X, Y].
NSExpression ns_bracket(const NSExpression& x, const NSExpression& y);
std::string to_string(const NSExpression& x);

// Functions Σ c θ^m z^k (m ∈ {0,1}, k rational) for the differential
// operator representation.
using FuncKey = std::pair<int, Rational>;
using Func = std::map<FuncKey, CRational>;

struct DiffOp {
  NSGen gen;
  CRational t;
  CRational s;
};

// L(n)_t and G(n+½)_{t,s}; c acts as zero. Throws DomainError for s = 0 and
// for non-real t on G.
DiffOp ns_diffop(const NSGen& g, const CRational& t, const CRational& s);
Func apply_diffop(const DiffOp& op, const Func& f);
Func func_monomial(int m, const Rational& k, const CRational& c = CRational(1));

// PBW words with the generators in non-decreasing pbw order, odd ones at
// most once.
using Word = std::vector<NSGen>;
int word_weight2(const Word& w);
bool word_is_odd(const Word& w);
bool is_pbw(const Word& w);
std::string to_string(const Word& w);

class EnvelopingElement {
 public:
  static constexpr int kNoCap = GradedPoly::kNoCap;

  EnvelopingElement() = default;
  // weight_cap2 bounds twice the raising weight and twice the lowering
  // weight of each word.
  EnvelopingElement(SymbolTablePtr table, int degree_cap = kNoCap, int weight_cap2 = kNoCap)
      : table_(std::move(table)), degree_cap_(degree_cap), weight_cap2_(weight_cap2) {}

  static EnvelopingElement one(SymbolTablePtr table, int degree_cap = kNoCap, int weight_cap2 = kNoCap);

  const SymbolTablePtr& table() const { return table_; }
  int degree_cap() const { return degree_cap_; }
  int weight_cap2() const { return weight_cap2_; }
  const std::map<Word, GradedPoly>& terms() const { return terms_; }
  bool is_zero() const { return terms_.empty(); }
  // Words dropped by the weight cap at some point in this value's history.
  bool overflow() const { return overflow_; }

  GradedPoly zero_poly() const { return GradedPoly(table_, degree_cap_); }
  GradedPoly coefficient(const Word& w) const;
  // w must already be PBW ordered.
  void add(const Word& w, const GradedPoly& p);
  EnvelopingElement degree_part(int d) const;
  int min_degree() const;

  EnvelopingElement& operator+=(const EnvelopingElement& o);
  EnvelopingElement& operator-=(const EnvelopingElement& o);
  EnvelopingElement operator-() const;
  friend bool operator==(const EnvelopingElement& a, const EnvelopingElement& b) { return a.terms_ == b.terms_; }

  friend EnvelopingElement operator*(const EnvelopingElement& a, const EnvelopingElement& b);
  friend EnvelopingElement operator*(const GradedPoly& p, const EnvelopingElement& a);

 private:
  void check_compatible(const EnvelopingElement& o) const;

  SymbolTablePtr table_;
  int degree_cap_ = kNoCap;
  int weight_cap2_ = kNoCap;
  bool overflow_ = false;
  std::map<Word, GradedPoly> terms_;
};

inline EnvelopingElement operator+(EnvelopingElement a, const EnvelopingElement& b) { return a += b; }
inline EnvelopingElement operator-(EnvelopingElement a, const EnvelopingElement& b) { return a -= b; }

// PBW expansion of a product of generators with rational coefficient 1.
std::map<Word, Rational> pbw_expand(const Word& w);
// coeff · g1 g2 ... gk rewritten in PBW order.
EnvelopingElement ns_normal_order(const GradedPoly& coeff, const Word& w, int degree_cap = GradedPoly::kNoCap,
                                  int weight_cap2 = EnvelopingElement::kNoCap);
EnvelopingElement ns_from_expression(const NSExpression& x, int degree_cap = GradedPoly::kNoCap);
// exp(X) for X with no degree-0 part; terminates by the degree cap.
EnvelopingElement ns_exp(const EnvelopingElement& x);
std::string to_string(const EnvelopingElement& x);

// Vectors in a Verma module: PBW raising words applied to the highest
// weight vector, with polynomial coefficients.
using VermaVector = std::map<Word, GradedPoly>;

class VermaModule {
 public:
  // c, h: formal symbols or constants from `table`. weight_cap2 is twice the
  // weight cap of the basis.
  VermaModule(SymbolTablePtr table, GradedPoly c, GradedPoly h, int weight_cap2, int degree_cap = GradedPoly::kNoCap);

  const SymbolTablePtr& table() const { return table_; }
  const GradedPoly& central_charge() const { return c_; }
  const GradedPoly& highest_weight() const { return h_; }
  int weight_cap2() const { return weight_cap2_; }
  int degree_cap() const { return degree_cap_; }
  const std::vector<Word>& basis() const { return basis_; }
  // -1 if not a basis word within the cap
  int index_of(const Word& w) const;
  // Number of basis vectors of weight exactly w2/2.
  int dimension(int weight2) const;

  GradedPoly zero_poly() const { return GradedPoly(table_, degree_cap_); }
  GradedPoly one_poly() const { return GradedPoly::constant(table_, CRational(1), degree_cap_); }

  // Memoized generator action on basis words; the cache belongs to the caller.
  struct Cache {
    std::map<std::pair<NSGen, Word>, VermaVector> act;
  };
  const VermaVector& act(Cache& cache, const NSGen& g, const Word& w) const;
  VermaVector act(Cache& cache, const NSGen& g, const VermaVector& v) const;
  // p·g acting on v with Koszul signs.
  VermaVector act(Cache& cache, const GradedPoly& p, const NSGen& g, const VermaVector& v) const;
  // A PBW (or any) word applied right to left.
  VermaVector act_word(Cache& cache, const Word& w, const VermaVector& v) const;
  VermaVector apply(Cache& cache, const EnvelopingElement& x, const VermaVector& v) const;
  VermaVector basis_vector(int i) const;

 private:
  SymbolTablePtr table_;
  GradedPoly c_, h_;
  int weight_cap2_;
  int degree_cap_;
  std::vector<Word> basis_;
  std::map<Word, int> index_;
};

void add_to(VermaVector& v, const Word& w, const GradedPoly& p);
void add_to(VermaVector& v, const VermaVector& u, const GradedPoly* scale = nullptr);
bool vectors_equal(const VermaVector& a, const VermaVector& b);
// Drop components of weight above weight_cap2/2.
VermaVector restrict_weight(const VermaVector& v, int weight_cap2);
std::string to_string(const VermaVector& v);

// Matrix of X on the basis, one column per basis vector, rows restricted to
// the weight cap. Serial reference and OpenMP-parallel over columns.
using VermaMatrix = std::vector<VermaVector>;
VermaMatrix ns_verma_act(const EnvelopingElement& x, const VermaModule& m);
VermaMatrix ns_verma_act_parallel(const EnvelopingElement& x, const VermaModule& m);

}  // namespace superns
