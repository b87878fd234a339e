#include "superns/grassmann.hpp"

#include <algorithm>
#include <sstream>

#include "superns/errors.hpp"

namespace superns {

Branch parse_branch(const std::string& s) {
  if (s == "+" || s == "plus") return Branch::plus;
  if (s == "-" || s == "minus") return Branch::minus;
  throw ParseError("branch must be + or -, got '" + s + "'");
}

std::string to_string(Branch b) { return b == Branch::plus ? "+" : "-"; }

int mask_product_sign(Mask m1, Mask m2) {
  if (m1 & m2) return 0;
  int inversions = 0;
  for (Mask rest = m2; rest; rest &= rest - 1) {
    int j = __builtin_ctzll(rest);
    inversions += mask_degree(j == 63 ? 0 : (m1 >> (j + 1)));
  }
  return (inversions & 1) ? -1 : 1;
}

static void check_generators(int L) {
  if (L < 0 || L > 63) throw DimensionError("generator count must be in [0, 63]");
}

Grassmann Grassmann::scalar(const CRational& c, int generators) {
  return monomial(0, c, generators);
}

Grassmann Grassmann::generator(int index, int generators) {
  if (index < 1 || index > generators)
    throw DimensionError("generator index " + std::to_string(index) + " outside 1.." +
                         std::to_string(generators));
  return monomial(Mask(1) << (index - 1), CRational(1), generators);
}

Grassmann Grassmann::monomial(Mask m, const CRational& c, int generators) {
  check_generators(generators);
  Grassmann g(generators);
  if (generators < 64 && (m >> generators) != 0) throw DimensionError("monomial uses generator beyond L");
  if (!c.is_zero()) g.terms_.emplace_back(m, c);
  return g;
}

CRational Grassmann::body() const {
  if (!terms_.empty() && terms_[0].first == 0) return terms_[0].second;
  return CRational(0);
}

Grassmann Grassmann::soul() const {
  Grassmann s(L_);
  for (const auto& t : terms_)
    if (t.first != 0) s.terms_.push_back(t);
  return s;
}

CRational Grassmann::coefficient(Mask m) const {
  auto it = std::lower_bound(terms_.begin(), terms_.end(), m,
                             [](const Term& t, Mask k) { return t.first < k; });
  if (it != terms_.end() && it->first == m) return it->second;
  return CRational(0);
}

bool Grassmann::is_even() const {
  return std::all_of(terms_.begin(), terms_.end(), [](const Term& t) { return mask_degree(t.first) % 2 == 0; });
}

bool Grassmann::is_odd() const {
  return std::all_of(terms_.begin(), terms_.end(), [](const Term& t) { return mask_degree(t.first) % 2 == 1; });
}

Grassmann Grassmann::even_part() const {
  Grassmann r(L_);
  for (const auto& t : terms_)
    if (mask_degree(t.first) % 2 == 0) r.terms_.push_back(t);
  return r;
}

Grassmann Grassmann::odd_part() const {
  Grassmann r(L_);
  for (const auto& t : terms_)
    if (mask_degree(t.first) % 2 == 1) r.terms_.push_back(t);
  return r;
}

Grassmann Grassmann::involute() const {
  Grassmann r = *this;
  for (auto& t : r.terms_)
    if (mask_degree(t.first) % 2 == 1) t.second = -t.second;
  return r;
}

int Grassmann::min_degree() const {
  int d = L_ + 1;
  for (const auto& t : terms_) d = std::min(d, mask_degree(t.first));
  return d;
}

void Grassmann::add_term(Mask m, const CRational& c) {
  if (c.is_zero()) return;
  if (L_ < 64 && (m >> L_) != 0) throw DimensionError("monomial uses generator beyond L");
  auto it = std::lower_bound(terms_.begin(), terms_.end(), m,
                             [](const Term& t, Mask k) { return t.first < k; });
  if (it != terms_.end() && it->first == m) {
    it->second += c;
    if (it->second.is_zero()) terms_.erase(it);
  } else {
    terms_.insert(it, {m, c});
  }
}

Grassmann Grassmann::with_generators(int generators) const {
  check_generators(generators);
  for (const auto& t : terms_)
    if (generators < 64 && (t.first >> generators) != 0)
      throw DimensionError("cannot shrink generator count below used generators");
  Grassmann r = *this;
  r.L_ = generators;
  return r;
}

static void require_same(const Grassmann& a, const Grassmann& b) {
  if (a.generators() != b.generators())
    throw DimensionError("Grassmann generator counts differ: " + std::to_string(a.generators()) +
                         " vs " + std::to_string(b.generators()));
}

static std::vector<Grassmann::Term> merge(const std::vector<Grassmann::Term>& a,
                                          const std::vector<Grassmann::Term>& b, bool subtract) {
  std::vector<Grassmann::Term> out;
  out.reserve(a.size() + b.size());
  auto i = a.begin(), j = b.begin();
  while (i != a.end() || j != b.end()) {
    if (j == b.end() || (i != a.end() && i->first < j->first)) {
      out.push_back(*i++);
    } else if (i == a.end() || j->first < i->first) {
      out.emplace_back(j->first, subtract ? -j->second : j->second);
      ++j;
    } else {
      CRational c = i->second;
      if (subtract)
        c -= j->second;
      else
        c += j->second;
      if (!c.is_zero()) out.emplace_back(i->first, std::move(c));
      ++i;
      ++j;
    }
  }
  return out;
}

Grassmann& Grassmann::operator+=(const Grassmann& o) {
  require_same(*this, o);
  if (o.terms_.empty()) return *this;
  terms_ = merge(terms_, o.terms_, false);
  return *this;
}

Grassmann& Grassmann::operator-=(const Grassmann& o) {
  require_same(*this, o);
  if (o.terms_.empty()) return *this;
  terms_ = merge(terms_, o.terms_, true);
  return *this;
}

Grassmann& Grassmann::operator*=(const CRational& c) {
  if (c.is_zero()) {
    terms_.clear();
    return *this;
  }
  for (auto& t : terms_) t.second *= c;
  return *this;
}

Grassmann Grassmann::operator-() const {
  Grassmann r = *this;
  for (auto& t : r.terms_) t.second = -t.second;
  return r;
}

Grassmann operator*(const Grassmann& a, const Grassmann& b) {
  require_same(a, b);
  Grassmann r(a.L_);
  if (a.terms_.empty() || b.terms_.empty()) return r;
  if (b.terms_.size() == 1 && b.terms_[0].first == 0) return Grassmann(a) *= b.terms_[0].second;
  if (a.terms_.size() == 1 && a.terms_[0].first == 0) return Grassmann(b) *= a.terms_[0].second;
  std::vector<Grassmann::Term> raw;
  raw.reserve(a.terms_.size() * b.terms_.size());
  for (const auto& [ma, ca] : a.terms_)
    for (const auto& [mb, cb] : b.terms_) {
      int s = mask_product_sign(ma, mb);
      if (s == 0) continue;
      CRational c = ca * cb;
      if (s < 0) c = -c;
      raw.emplace_back(ma | mb, std::move(c));
    }
  std::stable_sort(raw.begin(), raw.end(),
                   [](const Grassmann::Term& x, const Grassmann::Term& y) { return x.first < y.first; });
  for (auto& t : raw) {
    if (!r.terms_.empty() && r.terms_.back().first == t.first) {
      r.terms_.back().second += t.second;
      if (r.terms_.back().second.is_zero()) r.terms_.pop_back();
    } else if (!t.second.is_zero()) {
      r.terms_.push_back(std::move(t));
    }
  }
  return r;
}

Grassmann gr_mul(const Grassmann& a, const Grassmann& b) { return a * b; }

std::pair<CRational, Grassmann> gr_split(const Grassmann& a) { return {a.body(), a.soul()}; }

// Σ_k coeff(k) u^k for nilpotent u, stopping when u^k vanishes.
template <class CoeffFn>
static Grassmann soul_series(const Grassmann& u, CoeffFn coeff) {
  const int L = u.generators();
  Grassmann result = Grassmann::scalar(coeff(0), L);
  Grassmann power = Grassmann::scalar(CRational(1), L);
  for (long k = 1; k <= L; ++k) {
    power = power * u;
    if (power.is_zero()) break;
    result += power * coeff(k);
  }
  return result;
}

Grassmann gr_inverse(const Grassmann& a) {
  CRational b = a.body();
  if (b.is_zero()) throw NotInvertibleError("Grassmann element with zero body is not invertible");
  CRational binv = inverse(b);
  Grassmann u = a.soul() * binv;
  // 1/(b(1+u)) = b^{-1} Σ (-u)^k
  Grassmann s = soul_series(u, [](long k) { return CRational(k % 2 ? -1 : 1); });
  return s * binv;
}

Grassmann gr_sqrt(const Grassmann& a, Branch branch) {
  if (!a.is_even()) throw DomainError("square root of a non-even Grassmann element");
  CRational b = a.body();
  if (b.is_zero()) throw DomainError("square root of a Grassmann element with zero body");
  CRational root = principal_sqrt(b);
  if (branch == Branch::minus) root = -root;
  Grassmann u = a.soul() * inverse(b);
  // binomial(1/2, k)
  Grassmann s = soul_series(u, [](long k) {
    Rational c(1);
    for (long i = 0; i < k; ++i) c *= Rational(1, 2) - i;
    for (long i = 2; i <= k; ++i) c /= i;
    return CRational(c);
  });
  return s * root;
}

Grassmann gr_pow(const Grassmann& a, long n) {
  if (n < 0) return gr_pow(gr_inverse(a), -n);
  Grassmann result = Grassmann::scalar(CRational(1), a.generators()), base = a;
  while (n > 0) {
    if (n & 1) result = result * base;
    n >>= 1;
    if (n > 0) base = base * base;
  }
  return result;
}

Grassmann gr_half_pow(const Grassmann& a, long k, Branch branch) {
  if (k % 2 == 0) return gr_pow(a, k / 2);
  return gr_pow(gr_sqrt(a, branch), k);
}

std::string to_string(const Grassmann& a) {
  if (a.is_zero()) return "0";
  std::ostringstream os;
  bool first = true;
  for (const auto& [m, c] : a.terms()) {
    std::string cs = to_string(c);
    bool compound = !c.is_real() && sgn(c.re) != 0;
    if (!first) os << (cs[0] == '-' && !compound ? " - " : " + ");
    if (!first && cs[0] == '-' && !compound) cs = cs.substr(1);
    if (compound) cs = "(" + cs + ")";
    first = false;
    if (m == 0) {
      os << cs;
      continue;
    }
    if (cs != "1") os << (cs == "-1" ? "-" : cs + "*");
    os << "z";
    bool sep = false;
    os << "{";
    for (int i = 0; i < 64; ++i)
      if (m & (Mask(1) << i)) {
        if (sep) os << ",";
        os << i + 1;
        sep = true;
      }
    os << "}";
  }
  return os.str();
}

}  // namespace superns
