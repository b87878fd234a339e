#include <gtest/gtest.h>

#include <algorithm>
#include <chrono>
#include <numeric>

#include "superns/errors.hpp"
#include "superns/sewing.hpp"
#include "test_support.hpp"

using namespace superns;
using namespace superns::testing;

namespace {

const int D = 3;

GradedPoly sym(const SymbolTablePtr& t, char f, int j, int cap = D) {
  return GradedPoly::symbol(t, sewing_symbol(f, j), cap);
}
GradedPoly num(const SymbolTablePtr& t, const Rational& q, int cap = D) {
  return GradedPoly::constant(t, CRational(q), cap);
}
GradedPoly alpha(const SymbolTablePtr& t, int alpha2, int cap = D) { return GradedPoly::alpha_power(t, alpha2, cap); }

SewingInput random_input(const SymbolTablePtr& t, int jmax, int count) {
  SewingInput in;
  for (int k = 0; k < count; ++k) {
    int j = uniform(1, jmax);
    switch (uniform(0, 3)) {
      case 0:
        in.A[j] = sym(t, 'A', j);
        break;
      case 1:
        in.M[j] = sym(t, 'M', j);
        break;
      case 2:
        in.B[j] = sym(t, 'B', j);
        break;
      default:
        in.N[j] = sym(t, 'N', j);
    }
  }
  return in;
}

}  // namespace

TEST(Sewing, ZeroParameters) {
  auto t = sewing_table(2);
  SewingSeries s = sw_solve(SewingInput{}, t, D);
  EXPECT_TRUE(s.Psi.empty());
  EXPECT_TRUE(s.Gamma.is_zero());
}

TEST(Sewing, GammaVirasoroModeTwo) {
  auto t = sewing_table(2);
  SewingInput in;
  in.A[2] = sym(t, 'A', 2);
  in.B[2] = sym(t, 'B', 2);
  SewingSeries s = sw_solve(in, t, 2);
  EXPECT_EQ(s.Gamma, alpha(t, -4, 2) * sym(t, 'A', 2, 2) * sym(t, 'B', 2, 2) * CRational(frac(1, 2)));
}

TEST(Sewing, GammaFermionModeThreeHalves) {
  auto t = sewing_table(2);
  SewingInput in;
  in.M[2] = sym(t, 'M', 2);
  in.N[2] = sym(t, 'N', 2);
  SewingSeries s = sw_solve(in, t, 2);
  // (2/3) √α₀ α₀⁻² N M
  EXPECT_EQ(s.Gamma, alpha(t, -3, 2) * sym(t, 'N', 2, 2) * sym(t, 'M', 2, 2) * CRational(frac(2, 3)));
}

TEST(Sewing, GammaVanishesForModeOne) {
  auto t = sewing_table(1);
  SewingInput in;
  in.A[1] = sym(t, 'A', 1);
  in.B[1] = sym(t, 'B', 1);
  in.M[1] = sym(t, 'M', 1);
  in.N[1] = sym(t, 'N', 1);
  SewingSeries s = sw_solve(in, t, 2);
  EXPECT_TRUE(s.Gamma.degree_part(2).is_zero()) << to_string(s.Gamma);
  EXPECT_TRUE(sw_gamma2(in, t, 2).is_zero());
}

TEST(Sewing, DegreeTwoAgreesWithClosedForm) {
  auto t = sewing_table(4);
  for (int j = 1; j <= 4; ++j) {
    SewingInput even, odd;
    even.A[j] = sym(t, 'A', j);
    even.B[j] = sym(t, 'B', j);
    odd.M[j] = sym(t, 'M', j);
    odd.N[j] = sym(t, 'N', j);
    for (const auto& in : {even, odd}) {
      SewingSeries s = sw_solve(in, t, 2);
      EXPECT_EQ(s.Gamma, sw_gamma2(in, t, 2)) << "j = " << j;
    }
  }
  SewingInput all = sewing_symbols(t, 4, 2);
  EXPECT_EQ(sw_solve(all, t, 2).Gamma, sw_gamma2(all, t, 2));
}

TEST(Sewing, DegreeOneIsTheGeneratorsThemselves) {
  auto t = sewing_table(2);
  SewingInput in = sewing_symbols(t, 2, 1);
  SewingSeries s = sw_solve(in, t, 1);
  EXPECT_EQ(s.psi(NSGen::L(2)), -sym(t, 'A', 2, 1));
  EXPECT_EQ(s.psi(NSGen::L(-1)), -(alpha(t, -2, 1) * sym(t, 'B', 1, 1)));
  EXPECT_EQ(s.psi(NSGen::G2(-3)), -(alpha(t, -3, 1) * sym(t, 'N', 2, 1)));
}

TEST(Sewing, CentralChargeOnlyInGamma) {
  auto t = sewing_table(3);
  SewingSeries s = sw_solve(sewing_symbols(t, 3, D), t, D);
  const int c = t->index("c"), h = t->index("h");
  for (const auto& [g, p] : s.Psi) {
    EXPECT_FALSE(p.mentions(c));
    EXPECT_FALSE(p.mentions(h));
    EXPECT_TRUE(g.is_odd() ? p.is_odd() : p.is_even()) << to_string(g);
  }
  EXPECT_TRUE(s.Gamma.is_even());
  EXPECT_FALSE(s.Gamma.degree_part(3).is_zero());
}

TEST(Sewing, SolutionReproducesEnvelopingIdentity) {
  auto t = sewing_table(3);
  for (int trial = 0; trial < 5; ++trial) {
    SewingInput in = random_input(t, 3, 5);
    SewingSeries s = sw_solve(in, t, D);
    EXPECT_EQ(sw_left_side(in, t, D), sw_right_side(s, t));
  }
}

TEST(Sewing, VermaMatrixElementsSmall) {
  auto t = sewing_table(2);
  VermaModule m(t, GradedPoly::symbol(t, "c", D), GradedPoly::symbol(t, "h", D), 6, D);
  SewingInput in = sewing_symbols(t, 2, D);
  SewingSeries s = sw_solve(in, t, D);
  EXPECT_TRUE(sw_verify_verma(in, s, m, false).empty());
}

TEST(Sewing, VermaCheckDetectsWrongGamma) {
  auto t = sewing_table(2);
  VermaModule m(t, GradedPoly::symbol(t, "c", D), GradedPoly::symbol(t, "h", D), 2, D);
  SewingInput in;
  in.A[2] = sym(t, 'A', 2);
  in.B[2] = sym(t, 'B', 2);
  SewingSeries s = sw_solve(in, t, D);
  s.Gamma += alpha(t, -4) * sym(t, 'A', 2) * sym(t, 'B', 2);
  EXPECT_FALSE(sw_verify_verma(in, s, m, false).empty());
}

TEST(Sewing, VermaParallelMatchesSerial) {
  auto t = sewing_table(2);
  VermaModule m(t, GradedPoly::symbol(t, "c", D), GradedPoly::symbol(t, "h", D), 4, D);
  SewingInput in = random_input(t, 2, 4);
  SewingSeries s = sw_solve(in, t, D);
  EXPECT_EQ(sw_verify_verma(in, s, m, false), sw_verify_verma(in, s, m, true));
}

namespace {

Grassmann soul_even(int L) { return random_soul(L, 0, 2); }
Grassmann soul_odd(int L) { return random_soul(L, 1, 2); }

}  // namespace

TEST(Sewing, TSeriesZero) {
  auto parts = sw_t_series(CoordData::trivial(2), InfCoordData{}, 6);
  for (const auto& p : parts) EXPECT_TRUE(p.is_zero());
}

TEST(Sewing, TSeriesStabilizesAndMatchesSubstitution) {
  const int L = 3;
  for (int trial = 0; trial < 10; ++trial) {
    CoordData local = CoordData::trivial(L);
    long r = uniform(1, 3);
    local.a0 = Grassmann::scalar(CRational(r * r), L) + soul_even(L);
    InfCoordData inf;
    for (int j = 1; j <= 3; ++j) {
      local.A[j] = soul_even(L);
      local.M[j] = soul_odd(L);
      inf.B[j] = soul_even(L);
      inf.N[j] = soul_odd(L);
    }
    auto p3 = sw_t_series(local, inf, 20, 3);
    auto p4 = sw_t_series(local, inf, 20, 4);
    // products of four souls vanish with three generators
    EXPECT_EQ(p3.back(), p4.back());
    // each parameter carries at most α₀^{-jmax}, so orders stop at D·jmax
    for (size_t k = 2 * 3 * 3; k < p3.size(); ++k) EXPECT_EQ(p3[k], p3.back());

    auto t = sewing_table(3);
    SewingInput in = sewing_symbols(t, 3, 3);
    GradedPoly gamma = sw_solve(in, t, 3).Gamma;
    PolyValues v;
    v.generators = L;
    v.alpha = local.a0;
    v.branch = local.branch;
    v.symbols.assign(t->size(), Grassmann(L));
    for (int j = 1; j <= 3; ++j) {
      v.symbols[t->index(sewing_symbol('A', j))] = local.A[j];
      v.symbols[t->index(sewing_symbol('M', j))] = local.M[j];
      v.symbols[t->index(sewing_symbol('B', j))] = inf.B[j];
      v.symbols[t->index(sewing_symbol('N', j))] = inf.N[j];
    }
    EXPECT_EQ(p3.back(), evaluate(gamma, v));
  }
}

TEST(Sewing, BoundaryMap) {
  const int L = 1;
  const Window w{};
  SuperSeries id = ss_identity(L, w);
  SuperSeries I = ss_I(L, w);
  EXPECT_TRUE(known_equal(sw_boundary_map(id, I), id));

  // Ω∘I∘I⁻¹ collapses to Ω.
  Grassmann a = Grassmann::scalar(CRational(4), L);
  SuperSeries omega = ss_scaling(a, Branch::plus, w);
  SuperSeries b = sw_boundary_map(omega, I);
  EXPECT_TRUE(known_equal(b, omega));

  // with Ξ₀ = id the map is Ω∘I = (a/z, √a·iθ/z)
  SuperSeries oi = sw_boundary_map(omega, id);
  EXPECT_EQ(oi.zt.p.coefficient(-1), a);
  EXPECT_EQ(oi.tt.q.coefficient(-1), Grassmann::scalar(CRational(Rational(0), Rational(2)), L));

  for (int trial = 0; trial < 4; ++trial) {
    CoordData c = CoordData::trivial(3);
    c.A[1] = random_soul(3, 0, 2);
    c.M[2] = random_soul(3, 1, 2);
    InfCoordData inf;
    inf.B[2] = random_soul(3, 0, 2);
    inf.N[1] = random_soul(3, 1, 2);
    SuperSeries out = sw_boundary_map(ss_exp_zero(c, w), ss_exp_infinity(inf, 3, w));
    EXPECT_TRUE(ss_is_superconformal(out).first);
  }
}

namespace {

ModuliElement random_moduli(int n, int L) {
  ModuliElement q = sk_trivial(n, L);
  for (int i = 0; i < n - 1; ++i)
    q.punctures[i] = {Grassmann::scalar(CRational(3 * (i + 1), uniform(-1, 1)), L) + soul_even(L), soul_odd(L)};
  for (auto& c : q.local) {
    c.A[1] = soul_even(L);
    c.M[1] = soul_odd(L);
  }
  q.infinity.B[2] = soul_even(L);
  return q;
}

}  // namespace

TEST(Moduli, Validation) {
  EXPECT_NO_THROW(sk_trivial(3, 2).validate());
  ModuliElement q = sk_trivial(3, 2);
  q.punctures[1].first = q.punctures[0].first;
  EXPECT_THROW(q.validate(), DomainError);
  ModuliElement z = sk_trivial(0, 2);
  z.infinity.B[1] = Grassmann::generator(1, 2) * Grassmann::generator(2, 2);
  EXPECT_THROW(z.validate(), DomainError);
}

TEST(Moduli, CanSew) {
  const int L = 2;
  ModuliElement q1 = sk_trivial(3, L);  // punctures at 1, 2 and 0
  ModuliElement q0 = sk_trivial(0, L);
  EXPECT_TRUE(sw_can_sew(q1, 1, q0));
  ModuliElement q2 = sk_trivial(2, L);  // puncture at 1 and 0
  EXPECT_FALSE(sw_can_sew(q1, 1, q2));  // need 1 < r < 1
  q1.local[0].a0 = Grassmann::scalar(CRational(4), L);
  EXPECT_TRUE(sw_can_sew(q1, 1, q2));
  EXPECT_FALSE(sw_can_sew(q1, 1, q2, Rational(5)));
  // another puncture body coinciding with the sewing disc centre is never separable
  ModuliElement single = sk_trivial(1, L);
  EXPECT_TRUE(sw_can_sew(single, 1, q2));
  EXPECT_THROW(sw_can_sew(q1, 4, q2), DimensionError);
  EXPECT_THROW(sw_t_series(sk_trivial(3, L), 1, q2, 4), DomainError);
}

TEST(Moduli, PermutationGroupAction) {
  const int L = 2;
  for (int trial = 0; trial < 10; ++trial) {
    int n = uniform(2, 6);
    ModuliElement q = random_moduli(n, L);
    std::vector<int> id(n - 1);
    std::iota(id.begin(), id.end(), 1);
    EXPECT_EQ(sk_permute(id, q), q);
    std::vector<int> s1 = id, s2 = id;
    std::shuffle(s1.begin(), s1.end(), rng());
    std::shuffle(s2.begin(), s2.end(), rng());
    std::vector<int> comp(n - 1);
    for (int i = 0; i < n - 1; ++i) comp[i] = s1[s2[i] - 1];
    EXPECT_EQ(sk_permute(s1, sk_permute(s2, q)), sk_permute(comp, q));
    if (n >= 3) {
      std::vector<int> tr = id;
      std::swap(tr[0], tr[1]);
      EXPECT_EQ(sk_permute(tr, sk_permute(tr, q)), q);
    }
  }
  EXPECT_THROW(sk_permute({1}, sk_trivial(4, L)), DimensionError);
}

TEST(Moduli, JInvolution) {
  ModuliElement q = random_moduli(4, 3);
  ModuliElement j = sk_J(q);
  EXPECT_EQ(sk_J(j), q);
  EXPECT_EQ(j.branch, Branch::minus);
  for (size_t i = 0; i < q.punctures.size(); ++i) {
    EXPECT_EQ(j.punctures[i].second, -q.punctures[i].second);
    EXPECT_EQ(j.punctures[i].first, q.punctures[i].first);
  }
  EXPECT_EQ(j.local, q.local);
}
