#include "superns/superseries.hpp"

#include <sstream>

#include "superns/errors.hpp"

namespace superns {

SuperFn SuperFn::z(int generators, Window w) {
  return {Laurent::monomial(Grassmann::scalar(1, generators), 1, w), Laurent(generators, w)};
}

SuperFn SuperFn::theta(int generators, Window w) {
  return {Laurent(generators, w), Laurent::constant(Grassmann::scalar(1, generators), w)};
}

SuperFn SuperFn::constant(const Grassmann& c, Window w) {
  return {Laurent::constant(c, w), Laurent(c.generators(), w)};
}

SuperFn& SuperFn::operator+=(const SuperFn& o) {
  p += o.p;
  q += o.q;
  return *this;
}

SuperFn& SuperFn::operator-=(const SuperFn& o) {
  p -= o.p;
  q -= o.q;
  return *this;
}

SuperFn SuperFn::operator-() const { return {-p, -q}; }

SuperFn operator*(const SuperFn& a, const SuperFn& b) {
  // (p1 + θq1)(p2 + θq2) = p1p2 + θ(p1* q2 + q1 p2)
  return {a.p * b.p, a.p.involute() * b.q + a.q * b.p};
}

SuperFn operator*(const Grassmann& c, const SuperFn& a) { return {c * a.p, c.involute() * a.q}; }

SuperFn operator*(const SuperFn& a, const Grassmann& c) { return {a.p * c, a.q * c}; }

SuperFn involute(const SuperFn& a) { return {a.p.involute(), -a.q.involute()}; }

SuperFn dz(const SuperFn& a) { return {a.p.derivative(), a.q.derivative()}; }

static void check_underflow(const Laurent& a) {
  if (a.side() != Side::infinity && !a.known_zero() && a.min_exponent() == a.window().lo && a.min_exponent() != 0)
    throw TruncationError("window underflow: differentiating z^" + std::to_string(a.min_exponent()));
}

SuperFn ss_D(const SuperFn& a) {
  // D(p + θq) = q + θp'
  check_underflow(a.p);
  return {a.q, a.p.derivative()};
}

SuperFn compose_even(const Laurent& F, const SuperFn& Z) {
  // F(f + θξ) = F(f) + θ ξ F'(f)
  Laurent Ff = compose(F, Z.p);
  if (Z.q.known_zero() && Z.q.is_exact()) return {Ff, Laurent(F.generators(), F.window())};
  return {Ff, Z.q * compose(F.derivative(), Z.p)};
}

std::string to_string(const SuperFn& a) {
  return "[" + to_string(a.p) + "] + theta*[" + to_string(a.q) + "]";
}

CoordData CoordData::trivial(int generators) {
  CoordData c;
  c.a0 = Grassmann::scalar(1, generators);
  return c;
}

void CoordData::validate() const {
  const int L = a0.generators();
  if (!a0.is_even()) throw DomainError("a0 must be even");
  if (a0.body().is_zero()) throw DomainError("a0 must have nonzero body");
  for (const auto& [j, v] : A) {
    if (j < 1) throw DomainError("A_j needs j >= 1");
    if (v.generators() != L) throw DimensionError("A_j has wrong generator count");
    if (!v.is_even()) throw DomainError("A_j must be even");
  }
  for (const auto& [j, v] : M) {
    if (j < 1) throw DomainError("M_{j-1/2} needs j >= 1");
    if (v.generators() != L) throw DimensionError("M has wrong generator count");
    if (!v.is_odd()) throw DomainError("M_{j-1/2} must be odd");
  }
}

static bool same_support(const std::map<int, Grassmann>& a, const std::map<int, Grassmann>& b) {
  auto nonzero = [](const std::map<int, Grassmann>& m) {
    std::map<int, Grassmann> r;
    for (const auto& [k, v] : m)
      if (!v.is_zero()) r.emplace(k, v);
    return r;
  };
  return nonzero(a) == nonzero(b);
}

bool CoordData::operator==(const CoordData& o) const {
  return a0 == o.a0 && branch == o.branch && same_support(A, o.A) && same_support(M, o.M);
}

void InfCoordData::validate(int generators) const {
  for (const auto& [j, v] : B) {
    if (j < 1) throw DomainError("B_j needs j >= 1");
    if (v.generators() != generators) throw DimensionError("B_j has wrong generator count");
    if (!v.is_even()) throw DomainError("B_j must be even");
  }
  for (const auto& [j, v] : N) {
    if (j < 1) throw DomainError("N_{j-1/2} needs j >= 1");
    if (v.generators() != generators) throw DimensionError("N has wrong generator count");
    if (!v.is_odd()) throw DomainError("N_{j-1/2} must be odd");
  }
  if (sk0_constraint) {
    auto b1 = B.find(1);
    auto n1 = N.find(1);
    if ((b1 != B.end() && !b1->second.is_zero()) || (n1 != N.end() && !n1->second.is_zero()))
      throw DomainError("SK(0) requires (B_1, N_1/2) = (0, 0)");
  }
}

bool InfCoordData::operator==(const InfCoordData& o) const {
  return sk0_constraint == o.sk0_constraint && same_support(B, o.B) && same_support(N, o.N);
}

SuperSeries ss_identity(int generators, Window w) {
  return {SuperFn::z(generators, w), SuperFn::theta(generators, w)};
}

SuperSeries ss_I(int generators, Window w) {
  Grassmann one = Grassmann::scalar(1, generators);
  Grassmann i = Grassmann::scalar(CRational::i(), generators);
  return {SuperFn(Laurent::monomial(one, -1, w), Laurent(generators, w)),
          SuperFn(Laurent(generators, w), Laurent::monomial(i, -1, w))};
}

SuperSeries ss_I_inverse(int generators, Window w) {
  Grassmann one = Grassmann::scalar(1, generators);
  Grassmann mi = Grassmann::scalar(-CRational::i(), generators);
  return {SuperFn(Laurent::monomial(one, -1, w), Laurent(generators, w)),
          SuperFn(Laurent(generators, w), Laurent::monomial(mi, -1, w))};
}

SuperSeries ss_J(int generators, Window w) {
  return {SuperFn::z(generators, w), -SuperFn::theta(generators, w)};
}

SuperSeries ss_scaling(const Grassmann& a0, Branch branch, Window w) {
  const int L = a0.generators();
  return {a0 * SuperFn::z(L, w), gr_sqrt(a0, branch) * SuperFn::theta(L, w)};
}

SuperSeries ss_compose(const SuperSeries& H1, const SuperSeries& H2) {
  if (H1.generators() != H2.generators()) throw DimensionError("series generator counts differ");
  if (!(H1.window() == H2.window())) throw TruncationError("series windows differ");
  const SuperFn& Z = H2.zt;
  const SuperFn& T = H2.tt;
  SuperSeries r;
  r.zt = compose_even(H1.zt.p, Z) + T * compose_even(H1.zt.q, Z);
  r.tt = compose_even(H1.tt.p, Z) + T * compose_even(H1.tt.q, Z);
  return r;
}

namespace {

// Lowest (zero side / exact) or highest (infinity side) exponent whose
// coefficient has invertible body.
int leading_exponent(const Laurent& f) {
  if (f.side() == Side::infinity) {
    for (auto it = f.terms().rbegin(); it != f.terms().rend(); ++it)
      if (!it->second.body().is_zero()) return it->first;
  } else {
    for (const auto& [n, c] : f.terms())
      if (!c.body().is_zero()) return n;
  }
  throw NotInvertibleError("series has no invertible leading term");
}

SuperSeries invert_fixing_origin(const SuperSeries& H) {
  const int L = H.generators();
  const Window w = H.window();
  Grassmann a = H.zt.p.coefficient(1);
  Grassmann b = H.tt.q.coefficient(0);
  if (a.body().is_zero() || b.body().is_zero())
    throw NotInvertibleError("degenerate linear part: cannot invert series");
  Grassmann ainv = gr_inverse(a), binv = gr_inverse(b);
  SuperSeries id = ss_identity(L, w);
  SuperSeries K{ainv * id.zt, binv * id.tt};
  const int max_iter = 2 * (w.hi - w.lo + 2) * (L + 2);
  for (int it = 0; it < max_iter; ++it) {
    SuperSeries C = ss_compose(H, K);
    SuperFn ez = id.zt - C.zt, et = id.tt - C.tt;
    if (ez.known_zero() && et.known_zero()) return K;
    K.zt += ez * ainv;
    K.tt += et * binv;
  }
  throw NotInvertibleError("series inversion did not converge on the window");
}

}  // namespace

SuperSeries ss_invert(const SuperSeries& H) {
  int k = leading_exponent(H.zt.p);
  if (k == 1) return invert_fixing_origin(H);
  if (k == -1) {
    // H = I ∘ (I⁻¹∘H), so H⁻¹ = (I⁻¹∘H)⁻¹ ∘ I⁻¹
    SuperSeries Iinv = ss_I_inverse(H.generators(), H.window());
    SuperSeries inner = invert_fixing_origin(ss_compose(Iinv, H));
    return ss_compose(inner, Iinv);
  }
  throw NotInvertibleError("series with leading order z^" + std::to_string(k) + " is not invertible here");
}

SuperSeries ss_from_components(const Laurent& f, const Laurent& psi, Branch branch) {
  if (!f.is_even() || !psi.is_odd()) throw DomainError("f must be even and psi odd");
  Laurent d = f.derivative() + psi * psi.derivative();
  if (d.coefficient(0).body().is_zero() || (!d.known_zero() && d.min_exponent() < 0))
    throw DomainError("f' has non-invertible body at the expansion point");
  Laurent r = sqrt(d, branch);
  SuperSeries H;
  H.zt = SuperFn(f, psi * r);
  H.tt = SuperFn(psi, r);
  return H;
}

std::pair<bool, SuperSeries> ss_is_superconformal(const SuperSeries& H) {
  SuperFn residual = ss_D(H.zt) - H.tt * ss_D(H.tt);
  SuperSeries r{residual, SuperFn(H.generators(), H.window())};
  return {residual.known_zero(), r};
}

SuperFn apply_ell(int n, const Grassmann& coeff, const SuperFn& F) {
  // ℓ(n)(p + θq) = z^{n+1}p' + θ(z^{n+1}q' + ((n+1)/2) z^n q)
  const Window w = F.window();
  Laurent zp = Laurent::monomial(coeff, n + 1, w);
  Laurent p = zp * F.p.derivative();
  Laurent q = zp * F.q.derivative() +
              Laurent::monomial(coeff * CRational(frac(n + 1, 2)), n, w) * F.q;
  return {p, q};
}

SuperFn apply_gamma(int n, const Grassmann& mu, const SuperFn& F) {
  // μ z^{n+1}(∂θ − θ∂z)(p + θq) = z^{n+1} μq + θ z^{n+1} μp'
  Laurent zn = Laurent::monomial(Grassmann::scalar(1, mu.generators()), n + 1, F.window());
  return {zn * (mu * F.q), zn * (mu * F.p.derivative())};
}

namespace {

template <class X>
SuperFn exponentiate(const X& apply_x, const SuperFn& F) {
  SuperFn result = F;
  SuperFn term = F;
  const int max_terms = 4 * (F.window().hi - F.window().lo + 2) + 64;
  for (int k = 1;; ++k) {
    term = apply_x(term) * Grassmann::scalar(CRational(frac(1, k)), F.generators());
    result += term;
    if (term.known_zero()) break;
    if (k > max_terms) throw TruncationError("exponential did not terminate on the window");
  }
  return result;
}

}  // namespace

SuperSeries ss_exp_zero(const CoordData& c, Window w) {
  c.validate();
  if (w.lo > 0 || w.hi < 1) throw TruncationError("window too small to represent the leading terms");
  const int L = c.generators();
  auto X = [&](const SuperFn& F) {
    SuperFn r(L, w);
    for (const auto& [j, A] : c.A)
      if (!A.is_zero()) r += apply_ell(j, A, F);
    for (const auto& [j, M] : c.M)
      if (!M.is_zero()) r += apply_gamma(j - 1, M, F);
    return r;
  };
  SuperFn phi_z = exponentiate(X, SuperFn::z(L, w));
  SuperFn phi_t = exponentiate(X, SuperFn::theta(L, w));
  Grassmann root = gr_sqrt(c.a0, c.branch);
  return {c.a0 * phi_z, root * phi_t};
}

SuperSeries ss_exp_infinity(const InfCoordData& c, int generators, Window w) {
  c.validate(generators);
  if (w.lo > -1 || w.hi < 0) throw TruncationError("window too small to represent the leading terms");
  const int L = generators;
  auto X = [&](const SuperFn& F) {
    SuperFn r(L, w);
    for (const auto& [j, B] : c.B)
      if (!B.is_zero()) r -= apply_ell(-j, B, F);
    for (const auto& [j, N] : c.N)
      if (!N.is_zero()) r -= apply_gamma(-j, N, F);
    return r;
  };
  SuperSeries base = ss_I(L, w);
  return {exponentiate(X, base.zt), exponentiate(X, base.tt)};
}

bool known_zero(const SuperSeries& a) { return a.zt.known_zero() && a.tt.known_zero(); }

bool known_equal(const SuperSeries& a, const SuperSeries& b) {
  return (a.zt - b.zt).known_zero() && (a.tt - b.tt).known_zero();
}

CoordData ss_extract_zero(const SuperSeries& Hin) {
  const int L = Hin.generators();
  const Window w = Hin.window();
  auto [ok, residual] = ss_is_superconformal(Hin);
  if (!ok) throw DomainError("not superconformal; residual " + to_string(residual.zt));
  for (const auto& [n, c] : Hin.zt.p.terms())
    if (n < 1) throw DomainError("series does not vanish at zero");
  for (const auto& [n, c] : Hin.tt.p.terms())
    if (n < 1) throw DomainError("series does not vanish at zero");
  CoordData out;
  out.a0 = Hin.zt.p.coefficient(1);
  if (out.a0.body().is_zero()) throw DomainError("leading coefficient is not invertible");
  Grassmann root = gr_sqrt(out.a0, Branch::plus);
  Grassmann g0 = Hin.tt.q.coefficient(0);
  SuperSeries H = Hin;
  if (g0 == root) {
    out.branch = Branch::plus;
  } else if (g0 == -root) {
    out.branch = Branch::minus;
    H.tt = -H.tt;
  } else {
    throw DomainError("theta-linear leading coefficient is not a square root of a0");
  }
  Grassmann ainv = gr_inverse(out.a0), rinv = gr_inverse(root);
  SuperFn phi_z = ainv * H.zt, phi_t = rinv * H.tt;

  // weights 1/2, 1, 3/2, ...: M_{j-1/2} from z^j in ψ, A_j from z^{j+1} in f
  CoordData cur = CoordData::trivial(L);
  for (int j = 1; j <= w.hi; ++j) {
    SuperSeries E = ss_exp_zero(cur, w);
    if (phi_t.p.known(j)) {
      Grassmann m = phi_t.p.coefficient(j) - E.tt.p.coefficient(j);
      if (!m.is_zero()) cur.M[j] = m;
    }
    if (j + 1 > w.hi) break;
    E = ss_exp_zero(cur, w);
    if (phi_z.p.known(j + 1)) {
      Grassmann a = phi_z.p.coefficient(j + 1) - E.zt.p.coefficient(j + 1);
      if (!a.is_zero()) cur.A[j] = a;
    }
  }
  SuperSeries check = ss_exp_zero(cur, w);
  SuperSeries target{phi_z, phi_t};
  if (!known_equal(check, target))
    throw DomainError("coordinate extraction does not reproduce the series; residual " +
                      to_string(check.zt - target.zt) + " | " + to_string(check.tt - target.tt));
  cur.a0 = out.a0;
  cur.branch = out.branch;
  return cur;
}

std::pair<Grassmann, Grassmann> ss_evaluate(const SuperSeries& H, const Grassmann& z, const Grassmann& theta) {
  if (!z.is_even()) throw DomainError("z must be even");
  if (!theta.is_odd()) throw DomainError("theta must be odd");
  const Window w = H.window();
  if (w.lo < 0 && z.body().is_zero()) throw DomainError("evaluation point body at the pole z = 0");
  Grassmann zt = evaluate(H.zt.p, z) + theta * evaluate(H.zt.q, z);
  Grassmann tt = evaluate(H.tt.p, z) + theta * evaluate(H.tt.q, z);
  return {zt, tt};
}

std::string to_string(const SuperSeries& H) {
  return "ztilde = " + to_string(H.zt) + "\nthetatilde = " + to_string(H.tt);
}

}  // namespace superns
