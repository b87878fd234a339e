#pragma once

#include <functional>
#include <map>
#include <string>
#include <utility>
#include <vector>

#include "superns/graded_space.hpp"
#include "superns/sewing.hpp"
#include "superns/vosa.hpp"

namespace superns {

// ---- graded multilinear maps ----

// f : V^{⊗n} → V̄ on basis tuples, values truncated at the output cap.
// Values may carry Grassmann coefficients; f is Λ-linear with coefficients
// pulled out to the left.
struct MultiMap {
  GradedSpace space;
  int arity = 0;
  int generators = 0;
  std::map<std::vector<int>, LVec> values;

  const LVec& at(const std::vector<int>& labels) const;  // throws DimensionError
  bool operator==(const MultiMap& o) const;
};

MultiMap mm_identity(const GradedSpace& s, int generators);

struct TContraction {
  std::map<int, MultiMap> series;  // doubled power of t
  MultiMap at_one;
};

// (f ᵢ*₀ g)_t on every tuple where the needed values of f and g are known.
// Half-integer powers of t take the branch's sign at t = 1.
TContraction tc_contract(const MultiMap& f, const MultiMap& g, int i, Branch branch = Branch::plus);

// sigma lists σ(1), ..., σ(n) (1-based). The action on tensors is
// σ(v₁⊗…⊗vₙ) = ± v_{σ(1)}⊗…⊗v_{σ(n)}, built from transpositions (l k) with
// η(l k) = Σ_{l<j<k} η(v_j)(η(v_l) + η(v_k)) + η(v_k)η(v_l).
int koszul_sign(const std::vector<int>& sigma, const std::vector<int>& parities);
std::pair<int, std::vector<int>> koszul_permute(const std::vector<int>& sigma, const std::vector<int>& labels,
                                                const GradedSpace& s);
// σ(f)(x) = f(σ⁻¹(x)); defined on the tuples whose preimage f knows.
MultiMap koszul_permute(const std::vector<int>& sigma, const MultiMap& f);
// ⟨P′e′ᵢ, eⱼ⟩ = ⟨e′ᵢ, P eⱼ⟩ on the dual basis.
MultiMap adjoint_op(const MultiMap& p);

// ---- supermeromorphic functions ----

// Symbols z1.., t1.. (punctures), a{i}, ai{i} (a₀ and its inverse),
// A{i}_{j}, M{i}_{j} for i = 0..n; the 0-th tube reads from the data at
// infinity.
SymbolTablePtr smf_table(int n, int jmax);

struct SupermeromorphicFn {
  int n = 0;
  std::vector<int> s;                      // z_i^{s_i}, i = 1..n−1
  std::map<std::pair<int, int>, int> s_pair;  // (z_i − z_j − θ_iθ_j)^{s_ij}, 1 ≤ i < j ≤ n−1
  GradedPoly numerator;
};

Grassmann smf_evaluate(const SupermeromorphicFn& F, const ModuliElement& Q);

// ---- correlation maps of a VOSA ----

// ⟨v′, ν_n(Q)(v₁⊗…⊗vₙ)⟩ for every v′ of weight ≤ out_cap2/2, n ≤ 3. L′(j)
// is the adjoint of L(−j), so the 0-th tube acts on the output by raising
// operators. a₀^{−L(0)} uses the principal square root; on the negative
// branch the M parameters enter with the opposite sign. n = 3 is evaluated
// through the rational function in z₁, z₂ patched from both orders of the
// vertex operators; throws TruncationError when the two windows do not meet.
LVec nu_eval(const VertexData& V, const ModuliElement& Q, const std::vector<int>& labels, int out_cap2);
MultiMap nu_from_Y(const ModuliElement& Q, const VertexData& V, const std::vector<std::vector<int>>& tuples,
                   int out_cap2, bool parallel = true);

// A correlation family as a black box, the input of extraction.
struct Correlations {
  GradedSpace space;
  int weight_cap2 = 0;
  int label_cap2 = 0;  // extract modes of labels up to this weight
  std::function<LVec(const ModuliElement&, const std::vector<int>&)> nu;
};
Correlations nu_family(const VertexData& V);

// Vacuum, τ and modes by the residue formula, with each ν₂ component
// reconstructed by exact polynomial fitting in z. c is recomputed from τ.
VertexData extract_vosa(const Correlations& nu, bool parallel = true);
AxiomResult roundtrip_check(const VertexData& V, bool parallel = true);

// Positive energy, grading, supermeromorphicity (n = 2), permutation (n = 3,
// transposition of the movable punctures), the sewing desk case n = 2,
// m = 1 and compatibility with J.
Report check_sg_axioms(const VertexData& V, bool parallel = true);

AxiomResult check_positive_energy(const VertexData& V);
AxiomResult check_grading(const VertexData& V);
AxiomResult check_supermeromorphic(const VertexData& V, int label_cap2);
AxiomResult check_permutation(const VertexData& V, int label_cap2);
AxiomResult check_sewing_desk(const VertexData& V, int label_cap2);
AxiomResult check_j_compatibility(const VertexData& V, int label_cap2);

}  // namespace superns
