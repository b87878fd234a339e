#include <gtest/gtest.h>

#include <algorithm>
#include <numeric>

#include "superns/correspond.hpp"
#include "superns/errors.hpp"
#include "test_support.hpp"

using namespace superns;
using superns::testing::random_grassmann;
using superns::testing::uniform;

namespace {

const VertexData& fixture() {
  static const VertexData V = fixture_boson_fermion(8);
  return V;
}

GradedSpace toy_space() {
  GradedSpace s;
  s.weight2 = {0, 1, 2, 3};
  s.parity = {0, 1, 0, 1};
  s.labels = {"e0", "e1", "e2", "e3"};
  return s;
}

Grassmann num(const Rational& x, int L) { return Grassmann::scalar(CRational(x), L); }
Grassmann gen(int i, int L) { return Grassmann::generator(i, L); }

MultiMap random_map(const GradedSpace& s, int arity, int L) {
  MultiMap f{s, arity, L, {}};
  std::vector<int> t(arity, 0);
  while (true) {
    LVec v;
    for (int i = 0; i < s.size(); ++i)
      if (uniform(0, 1)) {
        Grassmann g = random_grassmann(L, -1, 3, uniform(0, 1) == 1);
        if (!g.is_zero()) v.emplace(i, g);
      }
    f.values[t] = v;
    int k = 0;
    while (k < arity && ++t[k] == s.size()) t[k++] = 0;
    if (k == arity) break;
  }
  return f;
}

// parity of the permuted tuple relative to the original: count inverted odd pairs
int inversion_sign(const std::vector<int>& sigma, const std::vector<int>& parities) {
  int n = static_cast<int>(sigma.size()), s = 0;
  for (int l = 0; l < n; ++l)
    for (int m = l + 1; m < n; ++m)
      if (sigma[l] > sigma[m] && parities[sigma[l] - 1] && parities[sigma[m] - 1]) ++s;
  return s % 2 ? -1 : 1;
}

std::vector<int> random_perm(int n) {
  std::vector<int> p(n);
  std::iota(p.begin(), p.end(), 1);
  for (int i = n - 1; i > 0; --i) std::swap(p[i], p[uniform(0, i)]);
  return p;
}

}  // namespace

// ---------------------------------------------------------------- contraction

TEST(Contraction, IdentityIsNeutral) {
  const GradedSpace s = toy_space();
  const int L = 3;
  const MultiMap f = random_map(s, 2, L);
  const MultiMap id = mm_identity(s, L);
  for (int i = 1; i <= 2; ++i) EXPECT_EQ(tc_contract(f, id, i).at_one, f) << "slot " << i;
  EXPECT_EQ(tc_contract(id, f, 1).at_one, f);
}

TEST(Contraction, MatchesBlockProduct) {
  const GradedSpace s = toy_space();
  const int L = 3;
  for (int rep = 0; rep < 4; ++rep) {
    const MultiMap f = random_map(s, 2, L), g = random_map(s, 2, L);
    for (Branch br : {Branch::plus, Branch::minus}) {
      const TContraction c = tc_contract(f, g, 2, br);
      for (int a = 0; a < s.size(); ++a)
        for (int b = 0; b < s.size(); ++b)
          for (int d = 0; d < s.size(); ++d) {
            // f(e_a, g(e_b, e_d)) with g's coefficients moved past e_a
            LVec want;
            for (const auto& [k, lam] : g.at({b, d})) {
              Grassmann coef = s.parity[a] ? lam.involute() : lam;
              if (br == Branch::minus && s.weight2[k] % 2) coef = -coef;
              axpy(want, coef, f.at({a, k}));
            }
            EXPECT_TRUE(lvec_equal(c.at_one.at({a, b, d}), want));
          }
      // the t-series sums to the value at t = 1 on the positive branch
      if (br == Branch::plus)
        for (const auto& [t, x] : c.at_one.values) {
          LVec sum;
          for (const auto& [k2, m] : c.series)
            if (m.values.count(t)) axpy(sum, num(1, L), m.at(t));
          EXPECT_TRUE(lvec_equal(sum, x));
        }
    }
  }
}

TEST(Contraction, BadIndexOrSpace) {
  const GradedSpace s = toy_space();
  const MultiMap f = mm_identity(s, 1);
  EXPECT_THROW(tc_contract(f, f, 2), DimensionError);
  EXPECT_THROW(tc_contract(f, mm_identity(s, 2), 1), DimensionError);
  GradedSpace t = s;
  t.labels[0] = "x";
  EXPECT_THROW(tc_contract(f, mm_identity(t, 1), 1), SchemaError);
}

// ---------------------------------------------------------------- permutations

TEST(Koszul, SmallCases) {
  EXPECT_EQ(koszul_sign({2, 1}, {1, 1}), -1);
  EXPECT_EQ(koszul_sign({2, 1}, {0, 1}), 1);
  EXPECT_EQ(koszul_sign({2, 1}, {0, 0}), 1);
  EXPECT_EQ(koszul_sign({3, 2, 1}, {1, 1, 1}), -1);
  EXPECT_EQ(koszul_sign({3, 2, 1}, {1, 0, 1}), -1);
  EXPECT_EQ(koszul_sign({1, 2, 3}, {1, 1, 1}), 1);
  EXPECT_THROW(koszul_sign({1, 1}, {0, 0}), DomainError);
  EXPECT_THROW(koszul_sign({1, 2}, {0}), DimensionError);
}

TEST(Koszul, MatchesInversionCount) {
  for (int rep = 0; rep < 200; ++rep) {
    const int n = uniform(1, 6);
    const auto sigma = random_perm(n);
    std::vector<int> par(n);
    for (int& p : par) p = uniform(0, 1);
    EXPECT_EQ(koszul_sign(sigma, par), inversion_sign(sigma, par));
  }
}

TEST(Koszul, ActionOnMapsInvertsAndComposes) {
  const GradedSpace s = toy_space();
  const MultiMap f = random_map(s, 3, 2);
  for (int rep = 0; rep < 6; ++rep) {
    const auto sigma = random_perm(3), tau = random_perm(3);
    std::vector<int> inv(3), comp(3);
    for (int l = 0; l < 3; ++l) inv[sigma[l] - 1] = l + 1;
    for (int l = 0; l < 3; ++l) comp[l] = sigma[tau[l] - 1];
    EXPECT_EQ(koszul_permute(inv, koszul_permute(sigma, f)), f);
    EXPECT_EQ(koszul_permute(tau, koszul_permute(sigma, f)), koszul_permute(comp, f));
  }
}

TEST(Adjoint, Basics) {
  const GradedSpace s = toy_space();
  const int L = 2;
  const Grassmann lam = num(3, L) + gen(1, L) * gen(2, L);
  MultiMap p{s, 1, L, {}};
  for (int i = 0; i < s.size(); ++i) p.values[{i}] = {{i, lam}};
  EXPECT_EQ(adjoint_op(p), p);
  MultiMap e{s, 1, L, {}};
  for (int i = 0; i < s.size(); ++i) e.values[{i}];
  e.values[{2}] = {{0, num(1, L)}};  // E_{02}: e2 ↦ e0
  const MultiMap ea = adjoint_op(e);
  EXPECT_TRUE(lvec_equal(ea.at({0}), LVec{{2, num(1, L)}}));
  EXPECT_TRUE(ea.at({2}).empty());
  const MultiMap r = random_map(s, 1, L);
  EXPECT_EQ(adjoint_op(adjoint_op(r)), r);
  MultiMap partial = r;
  partial.values.erase({1});
  EXPECT_THROW(adjoint_op(partial), DimensionError);
}

// ---------------------------------------------------------------- supermeromorphic functions

TEST(Supermeromorphic, ConstantAndShiftedPole) {
  const int L = 3;
  const SymbolTablePtr T = smf_table(3, 1);
  ModuliElement Q = sk_trivial(3, L);
  Q.punctures[0] = {num(3, L), gen(1, L)};
  Q.punctures[1] = {num(1, L), gen(2, L)};
  SupermeromorphicFn one{3, {0, 0}, {}, GradedPoly::constant(T, CRational(1))};
  EXPECT_EQ(smf_evaluate(one, Q), num(1, L));
  SupermeromorphicFn pole{3, {0, 0}, {{{1, 2}, 1}}, GradedPoly::constant(T, CRational(1))};
  // (z1 − z2 − θ1θ2)⁻¹ = (z1 − z2)⁻¹ + θ1θ2 (z1 − z2)⁻²
  const Grassmann want = num(frac(1, 2), L) + gen(1, L) * gen(2, L) * CRational(frac(1, 4));
  EXPECT_EQ(smf_evaluate(pole, Q), want);
  Q.punctures[1].first = num(3, L);
  EXPECT_THROW(smf_evaluate(pole, Q), DomainError);  // coincident punctures are not in the moduli space
}

TEST(Supermeromorphic, PolesAtZeroAndNumerator) {
  const int L = 2;
  const SymbolTablePtr T = smf_table(2, 1);
  ModuliElement Q = sk_trivial(2, L);
  Q.punctures[0] = {num(2, L), gen(1, L)};
  Q.local[0].A[1] = gen(1, L) * gen(2, L);
  GradedPoly p = GradedPoly::symbol(T, "z1") + GradedPoly::symbol(T, "A1_1");
  SupermeromorphicFn F{2, {2}, {}, p};
  EXPECT_EQ(smf_evaluate(F, Q), (num(2, L) + gen(1, L) * gen(2, L)) * CRational(frac(1, 4)));
  SupermeromorphicFn bad{2, {1}, {}, GradedPoly::constant(T, CRational(1))};
  Q.punctures[0].first = gen(1, L) * gen(2, L);
  EXPECT_THROW(smf_evaluate(bad, Q), DomainError);
}

TEST(Supermeromorphic, NegativeExponentRejected) {
  const int L = 2;
  const SymbolTablePtr T = smf_table(2, 0);
  ModuliElement Q = sk_trivial(2, L);
  SupermeromorphicFn F{2, {1}, {}, GradedPoly::constant(T, CRational(1))};
  EXPECT_NO_THROW(smf_evaluate(F, Q));
  SupermeromorphicFn neg{2, {-1}, {}, GradedPoly::constant(T, CRational(1))};
  EXPECT_THROW(smf_evaluate(neg, Q), DomainError);
}

// ---------------------------------------------------------------- correlation maps

TEST(Correlations, VacuumAtInfinity) {
  const VertexData& V = fixture();
  // a bare element of SK(0) carries no Grassmann data, so values live over Λ₀
  const LVec x = nu_eval(V, sk_trivial(0, 1), {}, V.weight_cap2);
  EXPECT_TRUE(lvec_equal(x, to_lvec(V.vacuum, 0)));
}

TEST(Correlations, TwoPointIsVertexOperator) {
  // Y(α(−1)1, z)1 = Σ_k z^k α(−1−k)1
  const VertexData& V = fixture();
  const int L = 1;
  const int a = V.space.find("a-1");
  const int one = V.space.find("1");
  ASSERT_GE(a, 0);
  ASSERT_GE(one, 0);
  ModuliElement Q = sk_trivial(2, L);
  Q.punctures[0] = {num(2, L), Grassmann(L)};
  LVec want;
  Rational zk = 1;
  for (int k = 0; 2 * (k + 1) <= V.weight_cap2; ++k, zk *= 2)
    axpy(want, num(zk, L), fock_boson(V, -1 - k, basis_vec(one)));
  EXPECT_TRUE(lvec_equal(nu_eval(V, Q, {a, one}, V.weight_cap2), want));
}

TEST(Correlations, GradingByLocalScale) {
  const VertexData& V = fixture();
  const int L = 1;
  ModuliElement Q = sk_trivial(1, L);
  Q.local[0].a0 = num(4, L);
  const int v = V.space.find("a-1.f-1/2");
  ASSERT_GE(v, 0);
  ASSERT_EQ(V.space.weight2[v], 3);
  EXPECT_TRUE(lvec_equal(nu_eval(V, Q, {v}, V.weight_cap2), LVec{{v, num(frac(1, 8), L)}}));
  Q.local[0].a0 = num(2, L);
  EXPECT_THROW(nu_eval(V, Q, {v}, V.weight_cap2), DomainError);
}

TEST(Correlations, InputErrors) {
  const VertexData& V = fixture();
  EXPECT_THROW(nu_eval(V, sk_trivial(2, 1), {0}, V.weight_cap2), DimensionError);
  EXPECT_THROW(nu_eval(V, sk_trivial(1, 1), {0}, V.weight_cap2 + 1), TruncationError);
  EXPECT_THROW(nu_eval(V, sk_trivial(4, 1), {0, 0, 0, 0}, V.weight_cap2), DomainError);
  EXPECT_THROW(nu_eval(V, sk_trivial(1, 1), {V.space.size()}, V.weight_cap2), DimensionError);
  const VertexData E = fixture_boson_fermion(6, false);
  EXPECT_THROW(nu_eval(E, sk_trivial(1, 1), {0}, 6), DomainError);
}

TEST(Correlations, ParallelMatchesSerial) {
  const VertexData& V = fixture();
  const int L = 2;
  ModuliElement Q = sk_trivial(2, L);
  Q.punctures[0] = {num(3, L), gen(1, L)};
  Q.local[0].M[1] = gen(2, L);
  std::vector<std::vector<int>> tuples;
  for (int a = 0; a < V.space.size(); ++a)
    if (V.space.weight2[a] <= 2)
      for (int b = 0; b < 8; ++b) tuples.push_back({a, b});
  EXPECT_EQ(nu_from_Y(Q, V, tuples, V.weight_cap2, true), nu_from_Y(Q, V, tuples, V.weight_cap2, false));
}

// ---------------------------------------------------------------- extraction

TEST(Extraction, VacuumTauAndModes) {
  const VertexData& V = fixture();
  const VertexData E = extract_vosa(nu_family(V));
  EXPECT_EQ(E.vacuum, V.vacuum);
  EXPECT_EQ(E.tau, V.tau);
  EXPECT_EQ(E.c, Rational(frac(3, 2)));
  EXPECT_TRUE(same_vertex_data(V, E, V.phi_label_cap2));
}

TEST(Extraction, RoundTrip) {
  const AxiomResult r = roundtrip_check(fixture());
  EXPECT_TRUE(r.pass) << r.witness;
  EXPECT_GT(r.checked, 1000);
}

// ---------------------------------------------------------------- supergeometric axioms

TEST(Axioms, FixtureSatisfiesAll) {
  const Report rep = check_sg_axioms(fixture());
  EXPECT_EQ(rep.size(), 6u);
  for (const auto& r : rep) {
    EXPECT_TRUE(r.pass) << r.axiom << ": " << r.witness;
    EXPECT_GT(r.checked, 0) << r.axiom;
  }
}

TEST(Axioms, MutatedModeBreaksPermutation) {
  const VertexData& V = fixture();
  VertexData M = V;
  const int a = V.space.find("a-1");
  auto& col = M.modes[a][0];  // α(0) is zero on the Fock space; make it act on e.g. α(−1)1
  col[a][a] += 1;
  EXPECT_FALSE(check_permutation(M, 2).pass);
}

TEST(Axioms, WrongCentralChargeBreaksSewing) {
  VertexData M = fixture();
  M.c += 1;
  const AxiomResult r = check_sewing_desk(M, 2);
  EXPECT_FALSE(r.pass);
}

TEST(Axioms, SpinStructureSwap) {
  const VertexData& V = fixture();
  const VertexData J = automorphism_J(V);
  const int L = 2;
  ModuliElement q = sk_trivial(2, L);
  q.punctures[0] = {num(2, L), gen(1, L)};
  q.local[0].M[1] = gen(2, L);
  const int f = V.space.find("f-1/2"), a = V.space.find("a-1");
  for (int x : {f, a})
    for (int y : {f, a}) EXPECT_TRUE(lvec_equal(nu_eval(V, q, {x, y}, 8), nu_eval(J, sk_J(q), {x, y}, 8)));
  // without J on the algebra side the two differ
  bool differs = false;
  for (int x : {f, a})
    for (int y : {f, a}) differs |= !lvec_equal(nu_eval(V, q, {x, y}, 8), nu_eval(V, sk_J(q), {x, y}, 8));
  EXPECT_TRUE(differs);
}
