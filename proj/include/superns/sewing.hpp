#pragma once

#include <map>
#include <string>
#include <vector>

#include "superns/nsalg.hpp"
#include "superns/superseries.hpp"

namespace superns {

// Parameter families of the sewing identity, j -> value. M and N are keyed
// by j for M_{j−½}, N_{j−½}.
struct SewingInput {
  std::map<int, GradedPoly> A, M, B, N;
};

// c, h (weight 0) and formal A_j, M_{j−½}, B_j, N_{j−½} for j ≤ jmax.
SymbolTablePtr sewing_table(int jmax);
std::string sewing_symbol(char family, int j);
// Every family symbolic on 1..jmax.
SewingInput sewing_symbols(const SymbolTablePtr& table, int jmax, int degree_cap);

struct SewingSeries {
  std::map<NSGen, GradedPoly> Psi;  // keyed by the generator each Ψ multiplies
  GradedPoly Gamma;
  int degree_cap = 0;

  GradedPoly psi(const NSGen& g) const;
};

// e^{−Σ(A_j L(j) + M G(j−½))} e^{−Σ(α^{−j} B_j L(−j) + α^{½−j} N G(−j+½))}, which
// is the left side with α₀^{−L(0)} moved to the right.
EnvelopingElement sw_left_side(const SewingInput& in, const SymbolTablePtr& table, int degree_cap);
// e^{Ψ₋} e^{Ψ₊} e^{Ψ₀L(0)} e^{Γc}
EnvelopingElement sw_right_side(const SewingSeries& s, const SymbolTablePtr& table);
SewingSeries sw_solve(const SewingInput& in, const SymbolTablePtr& table, int degree_cap);
GradedPoly sw_gamma2(const SewingInput& in, const SymbolTablePtr& table, int degree_cap);

// Matrix elements of both sides on a Verma module, computed by acting with
// each exponential factor on basis vectors; the common factor α₀^{−h} is
// dropped. Returns the basis indices where the sides differ.
std::vector<int> sw_verify_verma(const SewingInput& in, const SewingSeries& s, const VermaModule& m, bool parallel);

struct ModuliElement {
  int n = 0;
  std::vector<std::pair<Grassmann, Grassmann>> punctures;  // (z_i, θ_i), i = 1..n−1
  InfCoordData infinity;
  std::vector<CoordData> local;  // i = 1..n, the last one sits at 0
  Branch branch = Branch::plus;

  int generators() const;
  void validate() const;
  bool operator==(const ModuliElement& o) const;
};

ModuliElement sk_trivial(int n, int generators);
// σ lists the images σ(1), ..., σ(n−1) (1-based); puncture i moves to σ(i).
ModuliElement sk_permute(const std::vector<int>& sigma, const ModuliElement& q);
ModuliElement sk_J(const ModuliElement& q);

// Body-level disc condition for sewing the i-th puncture of q1 to the
// puncture at infinity of q2. margin ≥ 1 demands extra separation.
bool sw_can_sew(const ModuliElement& q1, int i, const ModuliElement& q2, const Rational& margin = Rational(1));
SuperSeries sw_boundary_map(const SuperSeries& local_i, const SuperSeries& inf_0);

// Partial sums at t = 1 of Γ(t⁻¹a₀, A, M, B, N) grouped by half-integer
// order in t: entry k collects orders ≤ k/2.
std::vector<Grassmann> sw_t_series(const CoordData& local_i, const InfCoordData& inf_0, int partials,
                                   int degree_cap = 3);
// Same, refusing when the two surfaces cannot be sewn.
std::vector<Grassmann> sw_t_series(const ModuliElement& q1, int i, const ModuliElement& q2, int partials,
                                   int degree_cap = 3);

}  // namespace superns
