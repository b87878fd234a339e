#include "superns/sewing.hpp"

#include <algorithm>
#include <mutex>

#include "superns/errors.hpp"

namespace superns {

std::string sewing_symbol(char family, int j) {
  if (family == 'M' || family == 'N') return std::string(1, family) + std::to_string(2 * j - 1) + "/2";
  return std::string(1, family) + std::to_string(j);
}

SymbolTablePtr sewing_table(int jmax) {
  std::vector<Symbol> s{{"c", false, 0}, {"h", false, 0}};
  for (char f : {'A', 'M', 'B', 'N'})
    for (int j = 1; j <= jmax; ++j) s.push_back({sewing_symbol(f, j), f == 'M' || f == 'N', 1});
  return std::make_shared<SymbolTable>(std::move(s));
}

SewingInput sewing_symbols(const SymbolTablePtr& table, int jmax, int degree_cap) {
  SewingInput in;
  for (int j = 1; j <= jmax; ++j) {
    in.A[j] = GradedPoly::symbol(table, sewing_symbol('A', j), degree_cap);
    in.M[j] = GradedPoly::symbol(table, sewing_symbol('M', j), degree_cap);
    in.B[j] = GradedPoly::symbol(table, sewing_symbol('B', j), degree_cap);
    in.N[j] = GradedPoly::symbol(table, sewing_symbol('N', j), degree_cap);
  }
  return in;
}

GradedPoly SewingSeries::psi(const NSGen& g) const {
  auto it = Psi.find(g);
  return it == Psi.end() ? GradedPoly(Gamma.table(), degree_cap) : it->second;
}

namespace {

GradedPoly capped(const GradedPoly& p, int cap) { return p.cap() == cap ? p : p.with_cap(cap); }

GradedPoly alpha(const SymbolTablePtr& t, int alpha2, int cap) { return GradedPoly::alpha_power(t, alpha2, cap); }

void check_input(const SewingInput& in) {
  for (const auto* fam : {&in.A, &in.B})
    for (const auto& [j, p] : *fam) {
      if (j < 1) throw DomainError("sewing parameters need j >= 1");
      if (!p.is_even()) throw DomainError("A_j and B_j must be even");
    }
  for (const auto* fam : {&in.M, &in.N})
    for (const auto& [j, p] : *fam) {
      if (j < 1) throw DomainError("sewing parameters need j >= 1");
      if (!p.is_odd()) throw DomainError("M and N must be odd");
    }
}

}  // namespace

EnvelopingElement sw_left_side(const SewingInput& in, const SymbolTablePtr& table, int D) {
  check_input(in);
  EnvelopingElement a(table, D), b(table, D);
  for (const auto& [j, p] : in.A) a.add({NSGen::L(j)}, capped(p, D));
  for (const auto& [j, p] : in.M) a.add({NSGen::G2(2 * j - 1)}, capped(p, D));
  // α₀^{−L(0)} X α₀^{L(0)} = α₀^{−w} X for X raising the weight by w
  for (const auto& [j, p] : in.B) b.add({NSGen::L(-j)}, alpha(table, -2 * j, D) * capped(p, D));
  for (const auto& [j, p] : in.N) b.add({NSGen::G2(-(2 * j - 1))}, alpha(table, -(2 * j - 1), D) * capped(p, D));
  return ns_exp(-a) * ns_exp(-b);
}

EnvelopingElement sw_right_side(const SewingSeries& s, const SymbolTablePtr& table) {
  const int D = s.degree_cap;
  EnvelopingElement minus(table, D), plus(table, D), zero(table, D), central(table, D);
  for (const auto& [g, p] : s.Psi) {
    if (g.is_raising())
      minus.add({g}, p);
    else if (g.is_lowering())
      plus.add({g}, p);
    else
      zero.add({g}, p);
  }
  central.add({NSGen::c()}, s.Gamma);
  return ns_exp(minus) * ns_exp(plus) * ns_exp(zero) * ns_exp(central);
}

SewingSeries sw_solve(const SewingInput& in, const SymbolTablePtr& table, int D) {
  if (D < 0 || D == GradedPoly::kNoCap) throw TruncationError("sewing solver needs a finite degree cap");
  const EnvelopingElement lhs = sw_left_side(in, table, D);
  SewingSeries s;
  s.degree_cap = D;
  s.Gamma = GradedPoly(table, D);
  for (int d = 1; d <= D; ++d) {
    EnvelopingElement diff = (lhs - sw_right_side(s, table)).degree_part(d);
    for (const auto& [w, p] : diff.terms()) {
      if (w.size() != 1)
        throw TruncationError("sewing solver: degree " + std::to_string(d) + " does not close (word " +
                              to_string(w) + ")");
      if (w[0].is_central()) {
        s.Gamma += p;
      } else {
        auto [it, inserted] = s.Psi.try_emplace(w[0], p);
        if (!inserted) it->second += p;
      }
    }
  }
  EnvelopingElement residual = lhs - sw_right_side(s, table);
  if (!residual.is_zero())
    throw TruncationError("sewing solver: residual at degree " + std::to_string(residual.min_degree()));
  for (auto it = s.Psi.begin(); it != s.Psi.end();)
    it = it->second.is_zero() ? s.Psi.erase(it) : std::next(it);
  return s;
}

GradedPoly sw_gamma2(const SewingInput& in, const SymbolTablePtr& table, int D) {
  check_input(in);
  GradedPoly g(table, D);
  for (const auto& [j, a] : in.A) {
    auto b = in.B.find(j);
    if (b == in.B.end()) continue;
    Rational k = frac(j * j * j - j, 12);
    g += alpha(table, -2 * j, D) * capped(a, D) * capped(b->second, D) * CRational(k);
  }
  for (const auto& [j, m] : in.M) {
    auto n = in.N.find(j);
    if (n == in.N.end()) continue;
    Rational k = frac(j * j - j, 3);
    g += alpha(table, 1 - 2 * j, D) * capped(n->second, D) * capped(m, D) * CRational(k);
  }
  return g;
}

namespace {

using Gens = std::vector<std::pair<NSGen, GradedPoly>>;

// e^X v for X = Σ p_g g, expanded until the degree cap kills the terms.
VermaVector exp_act(const VermaModule& m, VermaModule::Cache& cache, const Gens& x, const VermaVector& v) {
  VermaVector result = v, term = v;
  for (int k = 1; !term.empty(); ++k) {
    VermaVector next;
    for (const auto& [g, p] : x) add_to(next, m.act(cache, p, g, term));
    GradedPoly inv = GradedPoly::constant(m.table(), CRational(frac(1, k)), m.degree_cap());
    term.clear();
    add_to(term, next, &inv);
    add_to(result, term);
    if (k > 64) throw TruncationError("exponential on a Verma vector did not terminate");
  }
  return result;
}

// α₀^{−L(0)} with α₀^{−h} dropped.
VermaVector alpha_scale(const VermaModule& m, const VermaVector& v) {
  VermaVector out;
  for (const auto& [w, p] : v) add_to(out, w, alpha(m.table(), -word_weight2(w), m.degree_cap()) * p);
  return out;
}

struct Sides {
  Gens a, b, minus, plus, zero, central;
};

Sides split(const SewingInput& in, const SewingSeries& s, const VermaModule& m) {
  const int D = m.degree_cap();
  Sides r;
  for (const auto& [j, p] : in.A) r.a.push_back({NSGen::L(j), -capped(p, D)});
  for (const auto& [j, p] : in.M) r.a.push_back({NSGen::G2(2 * j - 1), -capped(p, D)});
  for (const auto& [j, p] : in.B) r.b.push_back({NSGen::L(-j), -capped(p, D)});
  for (const auto& [j, p] : in.N) r.b.push_back({NSGen::G2(-(2 * j - 1)), -capped(p, D)});
  for (const auto& [g, p] : s.Psi) {
    auto& dst = g.is_raising() ? r.minus : g.is_lowering() ? r.plus : r.zero;
    dst.push_back({g, capped(p, D)});
  }
  r.central.push_back({NSGen::c(), capped(s.Gamma, D)});
  return r;
}

bool check_column(const VermaModule& m, VermaModule::Cache& cache, const Sides& x, int i) {
  VermaVector v = m.basis_vector(i);
  VermaVector lhs = exp_act(m, cache, x.a, alpha_scale(m, exp_act(m, cache, x.b, v)));
  VermaVector rhs = exp_act(m, cache, x.central, v);
  rhs = alpha_scale(m, rhs);
  rhs = exp_act(m, cache, x.zero, rhs);
  rhs = exp_act(m, cache, x.plus, rhs);
  rhs = exp_act(m, cache, x.minus, rhs);
  return lhs == rhs;
}

}  // namespace

std::vector<int> sw_verify_verma(const SewingInput& in, const SewingSeries& s, const VermaModule& m, bool parallel) {
  if (m.degree_cap() != s.degree_cap) throw SchemaError("module and series use different degree caps");
  const Sides x = split(in, s, m);
  const int n = static_cast<int>(m.basis().size());
  std::vector<char> ok(n, 1);
  if (parallel) {
#pragma omp parallel
    {
      VermaModule::Cache cache;
#pragma omp for schedule(dynamic)
      for (int i = 0; i < n; ++i) ok[i] = check_column(m, cache, x, i);
    }
  } else {
    VermaModule::Cache cache;
    for (int i = 0; i < n; ++i) ok[i] = check_column(m, cache, x, i);
  }
  std::vector<int> bad;
  for (int i = 0; i < n; ++i)
    if (!ok[i]) bad.push_back(i);
  return bad;
}

// --- moduli ---

int ModuliElement::generators() const {
  if (!local.empty()) return local.front().generators();
  if (!punctures.empty()) return punctures.front().first.generators();
  for (const auto& [j, v] : infinity.B) return v.generators();
  for (const auto& [j, v] : infinity.N) return v.generators();
  return 0;
}

void ModuliElement::validate() const {
  if (n < 0) throw DomainError("negative puncture count");
  if (static_cast<int>(local.size()) != n) throw DimensionError("need one local coordinate per finite puncture");
  if (static_cast<int>(punctures.size()) != std::max(0, n - 1))
    throw DimensionError("need n-1 movable punctures");
  const int L = generators();
  infinity.validate(L);
  if (n == 0) {
    InfCoordData c = infinity;
    c.sk0_constraint = true;
    c.validate(L);
  }
  for (const auto& c : local) {
    if (c.generators() != L) throw DimensionError("local coordinate has wrong generator count");
    c.validate();
  }
  for (size_t i = 0; i < punctures.size(); ++i) {
    const auto& [z, t] = punctures[i];
    if (z.generators() != L || t.generators() != L) throw DimensionError("puncture has wrong generator count");
    if (!z.is_even() || !t.is_odd()) throw DomainError("puncture must be (even, odd)");
    if (z.body().is_zero()) throw DomainError("puncture body at zero");
    for (size_t j = 0; j < i; ++j)
      if (punctures[j].first.body() == z.body()) throw DomainError("puncture bodies coincide");
  }
}

bool ModuliElement::operator==(const ModuliElement& o) const {
  return n == o.n && punctures == o.punctures && infinity == o.infinity && local == o.local && branch == o.branch;
}

ModuliElement sk_trivial(int n, int generators) {
  ModuliElement q;
  q.n = n;
  q.infinity.sk0_constraint = n == 0;
  for (int i = 1; i < n; ++i)
    q.punctures.push_back({Grassmann::scalar(CRational(i), generators), Grassmann(generators)});
  for (int i = 0; i < n; ++i) q.local.push_back(CoordData::trivial(generators));
  return q;
}

ModuliElement sk_permute(const std::vector<int>& sigma, const ModuliElement& q) {
  const int m = static_cast<int>(q.punctures.size());
  if (static_cast<int>(sigma.size()) != m) throw DimensionError("permutation size does not match n-1");
  std::vector<char> seen(m, 0);
  for (int s : sigma) {
    if (s < 1 || s > m || seen[s - 1]) throw DomainError("not a permutation of 1..n-1");
    seen[s - 1] = 1;
  }
  ModuliElement r = q;
  for (int i = 0; i < m; ++i) {
    r.punctures[sigma[i] - 1] = q.punctures[i];
    r.local[sigma[i] - 1] = q.local[i];
  }
  return r;
}

ModuliElement sk_J(const ModuliElement& q) {
  ModuliElement r = q;
  for (auto& p : r.punctures) p.second = -p.second;
  r.branch = flip(q.branch);
  return r;
}

namespace {

Rational abs2(const CRational& c) { return c.re * c.re + c.im * c.im; }

}  // namespace

bool sw_can_sew(const ModuliElement& q1, int i, const ModuliElement& q2, const Rational& margin) {
  if (q1.n <= 0 || i < 1 || i > q1.n) throw DimensionError("sewing index out of range");
  if (margin < 1) throw DomainError("sewing margin must be at least 1");
  q1.validate();
  q2.validate();
  // finite puncture bodies of q1; the n-th one is 0
  std::vector<CRational> p1;
  for (const auto& [z, t] : q1.punctures) p1.push_back(z.body());
  p1.push_back(CRational(0));
  const CRational centre = p1[i - 1];
  // r must exceed every finite puncture of q2 and stay inside |a0|·dist(centre, other punctures of q1)
  Rational outer2 = 0;
  for (const auto& [z, t] : q2.punctures) outer2 = std::max(outer2, abs2(z.body()));
  bool bounded = false;
  Rational inner2 = 0;
  for (size_t k = 0; k < p1.size(); ++k) {
    if (static_cast<int>(k) == i - 1) continue;
    Rational d2 = abs2(p1[k] - centre);
    if (!bounded || d2 < inner2) inner2 = d2;
    bounded = true;
  }
  if (!bounded) return true;
  inner2 *= abs2(q1.local[i - 1].a0.body());
  return outer2 * margin * margin < inner2;
}

SuperSeries sw_boundary_map(const SuperSeries& local_i, const SuperSeries& inf_0) {
  SuperSeries I = ss_I(local_i.generators(), local_i.window());
  return ss_compose(local_i, ss_compose(I, ss_invert(inf_0)));
}

namespace {

// Γ depends only on which symbols are present, so solved series are reused.
GradedPoly cached_gamma(const SewingInput& in, const SymbolTablePtr& table, int jmax, int D) {
  static std::mutex mu;
  static std::map<std::string, GradedPoly> cache;
  std::string key = std::to_string(jmax) + ":" + std::to_string(D);
  for (const auto* fam : {&in.A, &in.M, &in.B, &in.N}) {
    key += "|";
    for (const auto& [j, p] : *fam) key += std::to_string(j) + ",";
  }
  {
    std::lock_guard<std::mutex> lock(mu);
    auto it = cache.find(key);
    if (it != cache.end()) return it->second;
  }
  GradedPoly g = sw_solve(in, table, D).Gamma;
  std::lock_guard<std::mutex> lock(mu);
  return cache.emplace(key, g).first->second;
}

}  // namespace

std::vector<Grassmann> sw_t_series(const CoordData& local_i, const InfCoordData& inf_0, int partials, int D) {
  local_i.validate();
  const int L = local_i.generators();
  inf_0.validate(L);
  int jmax = 1;
  for (const auto* fam : {&local_i.A, &local_i.M, &inf_0.B, &inf_0.N})
    for (const auto& [j, v] : *fam) jmax = std::max(jmax, j);
  SymbolTablePtr table = sewing_table(jmax);
  SewingInput in;
  PolyValues values;
  values.generators = L;
  values.alpha = local_i.a0;
  values.branch = local_i.branch;
  values.symbols.assign(table->size(), Grassmann(L));
  auto bind = [&](char f, const std::map<int, Grassmann>& data, std::map<int, GradedPoly>& dst) {
    for (const auto& [j, v] : data) {
      if (v.is_zero()) continue;
      dst[j] = GradedPoly::symbol(table, sewing_symbol(f, j), D);
      values.symbols[table->index(sewing_symbol(f, j))] = v;
    }
  };
  bind('A', local_i.A, in.A);
  bind('M', local_i.M, in.M);
  bind('B', inf_0.B, in.B);
  bind('N', inf_0.N, in.N);
  GradedPoly gamma = cached_gamma(in, table, jmax, D);
  // α₀ = t⁻¹a₀: the term α₀^{k/2} carries t^{−k/2}
  std::map<int, GradedPoly> by_order;
  for (const auto& [m, c] : gamma.terms()) {
    auto [it, inserted] = by_order.try_emplace(-m.alpha2, GradedPoly(table, D));
    it->second.add_term(m, c);
  }
  std::vector<Grassmann> out;
  Grassmann sum(L);
  auto it = by_order.begin();
  for (int k = 0; k < partials; ++k) {
    for (; it != by_order.end() && it->first <= k; ++it) sum += evaluate(it->second, values);
    out.push_back(sum);
  }
  return out;
}

std::vector<Grassmann> sw_t_series(const ModuliElement& q1, int i, const ModuliElement& q2, int partials, int D) {
  if (!sw_can_sew(q1, i, q2)) throw DomainError("surfaces cannot be sewn at this puncture");
  return sw_t_series(q1.local.at(i - 1), q2.infinity, partials, D);
}

}  // namespace superns
