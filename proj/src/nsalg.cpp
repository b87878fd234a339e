#include "superns/nsalg.hpp"

#include <omp.h>

#include <algorithm>
#include <regex>
#include <sstream>

#include "superns/errors.hpp"

namespace superns {

namespace {

std::string half_string(int twice) {
  if (twice % 2 == 0) return std::to_string(twice / 2);
  return std::to_string(twice) + "/2";
}

}  // namespace

std::string to_string(const NSGen& g) {
  switch (g.kind) {
    case NSGen::Kind::L:
      return "L(" + half_string(g.twice) + ")";
    case NSGen::Kind::G:
      return "G(" + half_string(g.twice) + ")";
    case NSGen::Kind::C:
      return "c";
  }
  return "?";
}

NSGen parse_nsgen(const std::string& s) {
  if (s == "c") return NSGen::c();
  static const std::regex re(R"(\s*([LG])\(\s*(-?\d+)(?:/(\d+))?\s*\)\s*)");
  std::smatch m;
  if (!std::regex_match(s, m, re)) throw ParseError("not an NS generator: " + s);
  int num = std::stoi(m[2]);
  int den = m[3].matched ? std::stoi(m[3]) : 1;
  if (den != 1 && den != 2) throw ParseError("bad mode index in " + s);
  int twice = den == 1 ? 2 * num : num;
  if (m[1] == "L") {
    if (twice % 2 != 0) throw ParseError("L needs an integer index: " + s);
    return {NSGen::Kind::L, twice};
  }
  if (twice % 2 == 0) throw ParseError("G needs a half-odd index: " + s);
  return NSGen::G2(twice);
}

std::tuple<int, int, int> pbw_rank(const NSGen& g) {
  if (g.kind == NSGen::Kind::C) return {2, 0, 0};
  if (g.twice == 0) return {1, 0, 0};
  const int sub_g = g.kind == NSGen::Kind::G ? 0 : 1;
  if (g.twice < 0) return {0, sub_g, g.twice};
  return {3, 1 - sub_g, g.twice};
}

bool pbw_less(const NSGen& a, const NSGen& b) { return pbw_rank(a) < pbw_rank(b); }

std::vector<NSTerm> ns_bracket(const NSGen& a, const NSGen& b) {
  using K = NSGen::Kind;
  std::vector<NSTerm> out;
  if (a.kind == K::C || b.kind == K::C) return out;
  const int ta = a.twice, tb = b.twice;
  if (a.kind == K::L && b.kind == K::L) {
    // (m − n)L(m+n) + (m³ − m)/12 δ c
    if (ta != tb) out.push_back({NSGen{K::L, ta + tb}, frac(ta - tb, 2)});
    if (ta + tb == 0) {
      Rational m = frac(ta, 2);
      Rational k = (m * m * m - m) / 12;
      if (k != 0) out.push_back({NSGen::c(), k});
    }
  } else if (a.kind == K::G && b.kind == K::L) {
    // [G(r), L(n)] = (r − n/2) G(r+n)
    Rational k = frac(2 * ta - tb, 4);
    if (k != 0) out.push_back({NSGen::G2(ta + tb), k});
  } else if (a.kind == K::L && b.kind == K::G) {
    Rational k = frac(ta - 2 * tb, 4);
    if (k != 0) out.push_back({NSGen::G2(ta + tb), k});
  } else {
    // [G(r), G(s)] = 2L(r+s) + (r² − ¼)/3 δ c
    out.push_back({NSGen{K::L, ta + tb}, Rational(2)});
    if (ta + tb == 0) {
      Rational k = frac(ta * ta - 1, 12);
      if (k != 0) out.push_back({NSGen::c(), k});
    }
  }
  return out;
}

NSExpression NSExpression::basis(SymbolTablePtr table, const NSGen& g, int cap) {
  NSExpression x(table, cap);
  x.add(g, GradedPoly::constant(table, CRational(1), cap));
  return x;
}

void NSExpression::add(const NSGen& g, const GradedPoly& p) {
  if (p.is_zero()) return;
  auto [it, inserted] = terms_.try_emplace(g, p);
  if (!inserted) {
    it->second += p;
    if (it->second.is_zero()) terms_.erase(it);
  }
}

NSExpression& NSExpression::operator+=(const NSExpression& o) {
  if (!table_) {
    table_ = o.table_;
    cap_ = o.cap_;
  }
  for (const auto& [g, p] : o.terms_) add(g, p);
  return *this;
}

NSExpression& NSExpression::operator-=(const NSExpression& o) {
  if (!table_) {
    table_ = o.table_;
    cap_ = o.cap_;
  }
  for (const auto& [g, p] : o.terms_) add(g, -p);
  return *this;
}

NSExpression operator*(const GradedPoly& p, const NSExpression& x) {
  NSExpression r(x.table(), x.cap());
  for (const auto& [g, q] : x.terms()) r.add(g, p * q);
  return r;
}

NSExpression ns_bracket(const NSExpression& x, const NSExpression& y) {
  NSExpression r(x.table(), x.cap());
  for (const auto& [gx, p] : x.terms())
    for (const auto& [gy, q] : y.terms()) {
      GradedPoly pq = p * (gx.is_odd() ? q.involute() : q);
      for (const auto& [g, k] : ns_bracket(gx, gy)) r.add(g, pq * CRational(k));
    }
  return r;
}

std::string to_string(const NSExpression& x) {
  if (x.is_zero()) return "0";
  std::ostringstream os;
  bool first = true;
  for (const auto& [g, p] : x.terms()) {
    if (!first) os << " + ";
    first = false;
    os << "(" << to_string(p) << ")*" << to_string(g);
  }
  return os.str();
}

DiffOp ns_diffop(const NSGen& g, const CRational& t, const CRational& s) {
  if (s.is_zero()) throw DomainError("G(n+1/2)_{t,s} needs s != 0");
  if (g.kind == NSGen::Kind::G && !t.is_real()) throw DomainError("G(n+1/2)_{t,s} needs real rational t");
  return {g, t, s};
}

Func func_monomial(int m, const Rational& k, const CRational& c) {
  Func f;
  if (!c.is_zero()) f[{m, k}] = c;
  return f;
}

namespace {

void func_add(Func& f, int m, const Rational& k, const CRational& c) {
  if (c.is_zero()) return;
  auto [it, inserted] = f.try_emplace(FuncKey{m, k}, c);
  if (!inserted) {
    it->second += c;
    if (it->second.is_zero()) f.erase(it);
  }
}

}  // namespace

Func apply_diffop(const DiffOp& op, const Func& f) {
  Func r;
  const NSGen& g = op.gen;
  if (g.kind == NSGen::Kind::C) return r;
  if (g.kind == NSGen::Kind::L) {
    // −(x^{n+1}∂x + ((n−1)/2 + t) φ xⁿ ∂φ)
    const int n = g.twice / 2;
    CRational theta_coeff = CRational(frac(n - 1, 2)) + op.t;
    for (const auto& [key, c] : f) {
      const auto& [m, k] = key;
      CRational coeff = CRational(k);
      if (m == 1) coeff += theta_coeff;
      func_add(r, m, k + n, -(coeff * c));
    }
    return r;
  }
  // −(s x^{n+t} ∂φ − (1/s) φ x^{n−t+2} ∂x), n + ½ = r
  const Rational n = frac(g.twice - 1, 2);
  const Rational& t = op.t.re;
  CRational sinv = inverse(op.s);
  for (const auto& [key, c] : f) {
    const auto& [m, k] = key;
    if (m == 1)
      func_add(r, 0, k + n + t, -(op.s * c));
    else
      func_add(r, 1, k + n - t + 1, sinv * CRational(k) * c);
  }
  return r;
}

int word_weight2(const Word& w) {
  int s = 0;
  for (const auto& g : w) s += g.weight2();
  return s;
}

bool word_is_odd(const Word& w) {
  int n = 0;
  for (const auto& g : w) n += g.is_odd();
  return n % 2 == 1;
}

bool is_pbw(const Word& w) {
  for (size_t i = 1; i < w.size(); ++i) {
    if (pbw_less(w[i], w[i - 1])) return false;
    if (w[i] == w[i - 1] && w[i].is_odd()) return false;
  }
  return true;
}

std::string to_string(const Word& w) {
  if (w.empty()) return "1";
  std::string s;
  for (size_t i = 0; i < w.size(); ++i) {
    if (i) s += " ";
    s += to_string(w[i]);
  }
  return s;
}

namespace {

using RatVec = std::map<Word, Rational>;

void rat_add(RatVec& v, const Word& w, const Rational& c) {
  if (c == 0) return;
  auto [it, inserted] = v.try_emplace(w, c);
  if (!inserted) {
    it->second += c;
    if (it->second == 0) v.erase(it);
  }
}

struct InsertCache {
  std::map<std::pair<NSGen, Word>, RatVec> memo;
};

// g · w for a PBW word w.
const RatVec& pbw_insert(InsertCache& cache, const NSGen& g, const Word& w) {
  auto key = std::make_pair(g, w);
  auto it = cache.memo.find(key);
  if (it != cache.memo.end()) return it->second;
  RatVec out;
  if (w.empty()) {
    out[{g}] = 1;
  } else {
    const NSGen& f = w.front();
    Word rest(w.begin() + 1, w.end());
    if (g == f && g.is_odd()) {
      // G(r)² = ½[G(r), G(r)] = L(2r)
      out = pbw_insert(cache, NSGen{NSGen::Kind::L, 2 * g.twice}, rest);
    } else if (!pbw_less(f, g)) {
      Word x;
      x.reserve(w.size() + 1);
      x.push_back(g);
      x.insert(x.end(), w.begin(), w.end());
      out[x] = 1;
    } else {
      // g f rest = ± f (g rest) + [g, f] rest
      const int sign = g.is_odd() && f.is_odd() ? -1 : 1;
      RatVec inner = pbw_insert(cache, g, rest);
      for (const auto& [u, cu] : inner)
        for (const auto& [x, cx] : pbw_insert(cache, f, u)) rat_add(out, x, sign * cu * cx);
      for (const auto& [b, cb] : ns_bracket(g, f))
        for (const auto& [x, cx] : pbw_insert(cache, b, rest)) rat_add(out, x, cb * cx);
    }
  }
  return cache.memo.emplace(std::move(key), std::move(out)).first->second;
}

InsertCache& insert_cache() {
  thread_local InsertCache cache;
  return cache;
}

RatVec pbw_product(const Word& a, const Word& b) {
  InsertCache& cache = insert_cache();
  RatVec cur{{b, Rational(1)}};
  for (auto it = a.rbegin(); it != a.rend(); ++it) {
    RatVec next;
    for (const auto& [u, cu] : cur)
      for (const auto& [x, cx] : pbw_insert(cache, *it, u)) rat_add(next, x, cu * cx);
    cur = std::move(next);
  }
  return cur;
}

bool exceeds(const Word& w, int cap2) {
  if (cap2 == EnvelopingElement::kNoCap) return false;
  int up = 0, down = 0;
  for (const auto& g : w) {
    if (g.is_raising()) up += g.weight2();
    if (g.is_lowering()) down -= g.weight2();
  }
  return up > cap2 || down > cap2;
}

}  // namespace

std::map<Word, Rational> pbw_expand(const Word& w) {
  return pbw_product(w, Word{});
}

EnvelopingElement EnvelopingElement::one(SymbolTablePtr table, int degree_cap, int weight_cap2) {
  EnvelopingElement e(table, degree_cap, weight_cap2);
  e.add({}, GradedPoly::constant(table, CRational(1), degree_cap));
  return e;
}

GradedPoly EnvelopingElement::coefficient(const Word& w) const {
  auto it = terms_.find(w);
  return it == terms_.end() ? zero_poly() : it->second;
}

void EnvelopingElement::add(const Word& w, const GradedPoly& p) {
  if (p.is_zero()) return;
  if (exceeds(w, weight_cap2_)) {
    overflow_ = true;
    return;
  }
  auto [it, inserted] = terms_.try_emplace(w, p.cap() == degree_cap_ ? p : p.with_cap(degree_cap_));
  if (!inserted) {
    it->second += p.cap() == degree_cap_ ? p : p.with_cap(degree_cap_);
    if (it->second.is_zero()) terms_.erase(it);
  } else if (it->second.is_zero()) {
    terms_.erase(it);
  }
}

EnvelopingElement EnvelopingElement::degree_part(int d) const {
  EnvelopingElement r(table_, degree_cap_, weight_cap2_);
  r.overflow_ = overflow_;
  for (const auto& [w, p] : terms_) r.add(w, p.degree_part(d));
  return r;
}

int EnvelopingElement::min_degree() const {
  int d = kNoCap;
  for (const auto& [w, p] : terms_) d = std::min(d, p.min_degree());
  return d;
}

void EnvelopingElement::check_compatible(const EnvelopingElement& o) const {
  if (degree_cap_ != o.degree_cap_ || weight_cap2_ != o.weight_cap2_)
    throw SchemaError("enveloping elements with different caps");
}

EnvelopingElement& EnvelopingElement::operator+=(const EnvelopingElement& o) {
  if (!table_) return *this = o;
  check_compatible(o);
  overflow_ = overflow_ || o.overflow_;
  for (const auto& [w, p] : o.terms_) add(w, p);
  return *this;
}

EnvelopingElement& EnvelopingElement::operator-=(const EnvelopingElement& o) {
  if (!table_) return *this = -o;
  check_compatible(o);
  overflow_ = overflow_ || o.overflow_;
  for (const auto& [w, p] : o.terms_) add(w, -p);
  return *this;
}

EnvelopingElement EnvelopingElement::operator-() const {
  EnvelopingElement r = *this;
  for (auto& [w, p] : r.terms_) p = -p;
  return r;
}

EnvelopingElement operator*(const EnvelopingElement& a, const EnvelopingElement& b) {
  a.check_compatible(b);
  EnvelopingElement r(a.table_, a.degree_cap_, a.weight_cap2_);
  r.overflow_ = a.overflow_ || b.overflow_;
  for (const auto& [wa, pa] : a.terms_) {
    const bool odd = word_is_odd(wa);
    const int da = pa.min_degree();
    for (const auto& [wb, pb] : b.terms_) {
      if (a.degree_cap_ != EnvelopingElement::kNoCap && da + pb.min_degree() > a.degree_cap_) continue;
      GradedPoly coeff = pa * (odd ? pb.involute() : pb);
      if (coeff.is_zero()) continue;
      for (const auto& [w, k] : pbw_product(wa, wb)) r.add(w, coeff * CRational(k));
    }
  }
  return r;
}

EnvelopingElement operator*(const GradedPoly& p, const EnvelopingElement& a) {
  EnvelopingElement r(a.table_, a.degree_cap_, a.weight_cap2_);
  r.overflow_ = a.overflow_;
  for (const auto& [w, q] : a.terms_) r.add(w, p * q);
  return r;
}

EnvelopingElement ns_normal_order(const GradedPoly& coeff, const Word& w, int degree_cap, int weight_cap2) {
  EnvelopingElement r(coeff.table(), degree_cap, weight_cap2);
  GradedPoly c = coeff.cap() == degree_cap ? coeff : coeff.with_cap(degree_cap);
  for (const auto& [x, k] : pbw_expand(w)) r.add(x, c * CRational(k));
  return r;
}

EnvelopingElement ns_from_expression(const NSExpression& x, int degree_cap) {
  EnvelopingElement r(x.table(), degree_cap);
  for (const auto& [g, p] : x.terms()) r.add({g}, p);
  return r;
}

EnvelopingElement ns_exp(const EnvelopingElement& x) {
  EnvelopingElement result = EnvelopingElement::one(x.table(), x.degree_cap(), x.weight_cap2());
  if (x.is_zero()) return result;
  if (x.min_degree() < 1) throw DomainError("exponential of an element with a degree-0 part");
  if (x.degree_cap() == EnvelopingElement::kNoCap) throw TruncationError("exponential needs a degree cap");
  EnvelopingElement term = result;
  for (int k = 1; k <= x.degree_cap(); ++k) {
    term = x * term;
    term = GradedPoly::constant(x.table(), CRational(frac(1, k)), x.degree_cap()) * term;
    if (term.is_zero()) break;
    result += term;
  }
  return result;
}

std::string to_string(const EnvelopingElement& x) {
  if (x.is_zero()) return "0";
  std::ostringstream os;
  bool first = true;
  for (const auto& [w, p] : x.terms()) {
    if (!first) os << " + ";
    first = false;
    os << "(" << to_string(p) << ")";
    if (!w.empty()) os << "*" << to_string(w);
  }
  return os.str();
}

// --- Verma modules ---

namespace {

void enumerate_words(const std::vector<NSGen>& gens, size_t start, int budget2, Word& cur, std::vector<Word>& out) {
  out.push_back(cur);
  for (size_t i = start; i < gens.size(); ++i) {
    const NSGen& g = gens[i];
    if (g.weight2() > budget2) continue;
    cur.push_back(g);
    enumerate_words(gens, g.is_odd() ? i + 1 : i, budget2 - g.weight2(), cur, out);
    cur.pop_back();
  }
}

}  // namespace

VermaModule::VermaModule(SymbolTablePtr table, GradedPoly c, GradedPoly h, int weight_cap2, int degree_cap)
    : table_(std::move(table)), weight_cap2_(weight_cap2), degree_cap_(degree_cap) {
  c_ = c.cap() == degree_cap ? c : c.with_cap(degree_cap);
  h_ = h.cap() == degree_cap ? h : h.with_cap(degree_cap);
  if (!c_.is_even() || !h_.is_even()) throw DomainError("central charge and highest weight must be even");
  std::vector<NSGen> gens;
  for (int t = -weight_cap2; t < 0; ++t) gens.push_back(t % 2 ? NSGen::G2(t) : NSGen{NSGen::Kind::L, t});
  std::sort(gens.begin(), gens.end(), pbw_less);
  Word cur;
  enumerate_words(gens, 0, weight_cap2, cur, basis_);
  std::stable_sort(basis_.begin(), basis_.end(),
                   [](const Word& a, const Word& b) { return word_weight2(a) < word_weight2(b); });
  for (size_t i = 0; i < basis_.size(); ++i) index_.emplace(basis_[i], static_cast<int>(i));
}

int VermaModule::index_of(const Word& w) const {
  auto it = index_.find(w);
  return it == index_.end() ? -1 : it->second;
}

int VermaModule::dimension(int weight2) const {
  int n = 0;
  for (const auto& w : basis_) n += word_weight2(w) == weight2;
  return n;
}

void add_to(VermaVector& v, const Word& w, const GradedPoly& p) {
  if (p.is_zero()) return;
  auto [it, inserted] = v.try_emplace(w, p);
  if (!inserted) {
    it->second += p;
    if (it->second.is_zero()) v.erase(it);
  }
}

void add_to(VermaVector& v, const VermaVector& u, const GradedPoly* scale) {
  for (const auto& [w, p] : u) add_to(v, w, scale ? *scale * p : p);
}

const VermaVector& VermaModule::act(Cache& cache, const NSGen& g, const Word& w) const {
  auto key = std::make_pair(g, w);
  auto it = cache.act.find(key);
  if (it != cache.act.end()) return it->second;
  VermaVector out;
  if (g.kind == NSGen::Kind::C) {
    add_to(out, w, c_);
  } else if (g.twice == 0) {
    add_to(out, w, h_ + GradedPoly::constant(table_, CRational(frac(word_weight2(w), 2)), degree_cap_));
  } else if (w.empty()) {
    if (g.is_raising()) add_to(out, Word{g}, one_poly());
  } else {
    const NSGen& f = w.front();
    Word rest(w.begin() + 1, w.end());
    if (g.is_raising() && g == f && g.is_odd()) {
      out = act(cache, NSGen{NSGen::Kind::L, 2 * g.twice}, rest);
    } else if (g.is_raising() && !pbw_less(f, g)) {
      Word x;
      x.push_back(g);
      x.insert(x.end(), w.begin(), w.end());
      add_to(out, x, one_poly());
    } else {
      // g f rest = ± f (g rest) + [g, f] rest
      VermaVector inner = act(cache, g, rest);
      VermaVector moved = act(cache, f, inner);
      if (g.is_odd() && f.is_odd())
        for (auto& [x, p] : moved) p = -p;
      add_to(out, moved);
      for (const auto& [b, k] : ns_bracket(g, f)) {
        GradedPoly s = GradedPoly::constant(table_, CRational(k), degree_cap_);
        add_to(out, act(cache, b, rest), &s);
      }
    }
  }
  return cache.act.emplace(std::move(key), std::move(out)).first->second;
}

VermaVector VermaModule::act(Cache& cache, const NSGen& g, const VermaVector& v) const {
  VermaVector out;
  for (const auto& [w, p] : v) {
    GradedPoly q = g.is_odd() ? p.involute() : p;
    add_to(out, act(cache, g, w), &q);
  }
  return out;
}

VermaVector VermaModule::act(Cache& cache, const GradedPoly& p, const NSGen& g, const VermaVector& v) const {
  VermaVector gv = act(cache, g, v);
  VermaVector out;
  for (const auto& [w, q] : gv) add_to(out, w, p * q);
  return out;
}

VermaVector VermaModule::act_word(Cache& cache, const Word& w, const VermaVector& v) const {
  VermaVector cur = v;
  for (auto it = w.rbegin(); it != w.rend(); ++it) cur = act(cache, *it, cur);
  return cur;
}

VermaVector VermaModule::apply(Cache& cache, const EnvelopingElement& x, const VermaVector& v) const {
  VermaVector out;
  for (const auto& [w, p] : x.terms()) {
    VermaVector wv = act_word(cache, w, v);
    for (const auto& [b, q] : wv) add_to(out, b, p * q);
  }
  return out;
}

VermaVector VermaModule::basis_vector(int i) const { return {{basis_.at(i), one_poly()}}; }

bool vectors_equal(const VermaVector& a, const VermaVector& b) { return a == b; }

VermaVector restrict_weight(const VermaVector& v, int weight_cap2) {
  VermaVector r;
  for (const auto& [w, p] : v)
    if (word_weight2(w) <= weight_cap2) r.emplace(w, p);
  return r;
}

std::string to_string(const VermaVector& v) {
  if (v.empty()) return "0";
  std::ostringstream os;
  bool first = true;
  for (const auto& [w, p] : v) {
    if (!first) os << " + ";
    first = false;
    os << "(" << to_string(p) << ")*" << to_string(w) << "|h>";
  }
  return os.str();
}

static void check_caps(const EnvelopingElement& x, const VermaModule& m) {
  if (x.table() && !(*x.table() == *m.table())) throw SchemaError("enveloping element and module use different symbol tables");
  if (x.degree_cap() != m.degree_cap()) throw SchemaError("enveloping element and module use different degree caps");
}

VermaMatrix ns_verma_act(const EnvelopingElement& x, const VermaModule& m) {
  check_caps(x, m);
  VermaModule::Cache cache;
  VermaMatrix out(m.basis().size());
  for (size_t i = 0; i < m.basis().size(); ++i)
    out[i] = restrict_weight(m.apply(cache, x, m.basis_vector(static_cast<int>(i))), m.weight_cap2());
  return out;
}

VermaMatrix ns_verma_act_parallel(const EnvelopingElement& x, const VermaModule& m) {
  check_caps(x, m);
  const int n = static_cast<int>(m.basis().size());
  VermaMatrix out(n);
#pragma omp parallel
  {
    VermaModule::Cache cache;
#pragma omp for schedule(dynamic)
    for (int i = 0; i < n; ++i) out[i] = restrict_weight(m.apply(cache, x, m.basis_vector(i)), m.weight_cap2());
  }
  return out;
}

}  // namespace superns
