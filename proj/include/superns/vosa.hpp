#pragma once

#include <compare>
#include <map>
#include <string>
#include <vector>

#include "superns/graded_space.hpp"
#include "superns/nsalg.hpp"

namespace superns {

// ---- formal δ-calculus in x0, x1, x2 and odd φ1, φ2 ----

struct DeltaMonomial {
  int a = 0, b = 0, c = 0;  // exponents of x0, x1, x2
  bool phi1 = false, phi2 = false;
  auto operator<=>(const DeltaMonomial&) const = default;
};

enum class DeltaVariant {
  plain,          // δ(x1) = Σ x1ⁿ
  shifted,        // δ((x1 − x2 − φ1φ2)/x0), binomial expansion of the shifted power
  shifted_split,  // δ((x1 − x2)/x0) − φ1φ2 x0⁻¹ δ′((x1 − x2)/x0)
  jacobi_first,   // x0⁻¹ δ((x1 − x2 − φ1φ2)/x0)
  jacobi_second,  // x0⁻¹ δ((x2 − x1 + φ1φ2)/(−x0))
  jacobi_third,   // x2⁻¹ δ((x1 − x0 − φ1φ2)/x2)
};

// Coefficients on |a|, |b|, |c| ≤ window. Binomials (x − y)ⁿ are expanded in
// nonnegative powers of y.
struct DeltaSeries {
  int window = 0;
  std::map<DeltaMonomial, Rational> coeffs;

  Rational coefficient(const DeltaMonomial& m) const;
  bool operator==(const DeltaSeries&) const = default;
};

Rational binomial(long n, long k);  // any integer n, k ≥ 0
DeltaSeries delta_expand(DeltaVariant v, int window);
// Single coefficient of one of the three Jacobi δ-factors.
Rational delta_coefficient(DeltaVariant v, const DeltaMonomial& m);
// (x1 + φ1φ2)ⁿ
DeltaSeries shift_power(int n, int window);

// ---- vertex data ----

// Y(v,(x,φ)) = Σ v_n x^{−n−1} + φ Σ v_{n−½} x^{−n−1}. modes[v] maps the
// doubled index n2 = 2n to the matrix of v_n; odd n2 are the φ-modes. A mode
// that is absent but available is zero.
struct VertexData {
  GradedSpace space;
  int weight_cap2 = 0;
  int phi_label_cap2 = -1;  // labels up to this weight carry φ-modes; −1 without odd variables
  SparseVec vacuum;
  SparseVec tau;
  Rational c;
  std::vector<std::map<int, SparseMat>> modes;

  bool odd_variables() const { return phi_label_cap2 >= 0; }
  // Whether the mode v_{n2/2} of a basis label is known.
  bool has_mode(int label, int n2) const;
  int mode_weight2(int label, int n2) const { return space.weight2[label] - n2 - 2; }
  const SparseMat* mode(int label, int n2) const;
  void validate() const;
};

// out += coeff · u_{n2/2} w. Returns false when part of the result would land
// above the weight cap or needs an unknown mode.
bool add_mode(const VertexData& V, int label, int n2, const Rational& coeff, const SparseVec& w, SparseVec& out);
bool add_mode(const VertexData& V, const SparseVec& u, int n2, const Rational& coeff, const SparseVec& w,
              SparseVec& out);
// Same for NS generators read off τ: G(n+½) = τ_{n+1}, 2L(n) = τ_{n+½}.
bool add_ns(const VertexData& V, const NSGen& g, const Rational& coeff, const SparseVec& w, SparseVec& out);
SparseVec apply_ns(const VertexData& V, const NSGen& g, const SparseVec& w);  // throws TruncationError

// Free boson α(n) ⊗ free fermion ψ(r), truncated at weight cap2/2, with
// τ = α(−1)ψ(−½)1. Modes come from the iterate formula; φ-modes via F2.
VertexData fixture_boson_fermion(int weight_cap2, bool odd_variables = true);
// Fock space operators of the fixture, for oracles.
SparseVec fock_boson(const VertexData& V, int n, const SparseVec& w);
SparseVec fock_fermion(const VertexData& V, int twice_r, const SparseVec& w);

// ---- checks ----

struct AxiomResult {
  AxiomResult() = default;
  explicit AxiomResult(std::string name) : axiom(std::move(name)) {}

  std::string axiom;
  bool pass = true;
  long checked = 0;  // individual comparisons made
  std::string witness;
};
using Report = std::vector<AxiomResult>;
bool all_pass(const Report& r);
std::string to_string(const Report& r);

// Central charge read from L(2)L(−2)1 = (c/2)1; the second value is read
// from G(3/2)G(−3/2)1 = (2c/3)1.
std::pair<Rational, Rational> central_charge(const VertexData& V);

AxiomResult check_vacuum(const VertexData& V);
AxiomResult check_creation(const VertexData& V);
// Jacobi identity for one pair of basis labels on every complete coefficient
// of the window; with odd variables all four φ-components are compared.
AxiomResult jacobi_check(const VertexData& V, int u, int v);
// All pairs of labels whose modes are fully known.
AxiomResult jacobi_check_all(const VertexData& V, bool parallel);
Report consequence_checks(const VertexData& V);
// NS relations for τ's modes with |index| ≤ range against ns_bracket.
AxiomResult ns_modes_check(const VertexData& V, int range = 4);
Report check_vosa(const VertexData& V, bool parallel = true);

// ---- functors and automorphisms ----

VertexData convert_F1(const VertexData& V);
VertexData convert_F2(const VertexData& V);
VertexData automorphism_J(const VertexData& V);  // J₁ with odd variables, J₂ without
// Mode tables, vacuum and τ agree on labels up to label_cap2.
bool same_vertex_data(const VertexData& a, const VertexData& b, int label_cap2);

}  // namespace superns
