#include "superns/graded_poly.hpp"

#include <sstream>

#include "superns/errors.hpp"

namespace superns {

SymbolTable::SymbolTable(std::vector<Symbol> symbols) : symbols_(std::move(symbols)) {
  if (symbols_.size() > static_cast<size_t>(kMaxSymbols))
    throw SchemaError("too many symbols (max " + std::to_string(kMaxSymbols) + ")");
  for (size_t i = 0; i < symbols_.size(); ++i) {
    for (size_t j = 0; j < i; ++j)
      if (symbols_[j].name == symbols_[i].name) throw SchemaError("duplicate symbol " + symbols_[i].name);
    if (symbols_[i].odd) odd_mask_ |= Mask(1) << i;
  }
}

int SymbolTable::find(const std::string& name) const {
  for (size_t i = 0; i < symbols_.size(); ++i)
    if (symbols_[i].name == name) return static_cast<int>(i);
  return -1;
}

int SymbolTable::index(const std::string& name) const {
  int i = find(name);
  if (i < 0) throw SchemaError("unknown symbol " + name);
  return i;
}

bool SymbolTable::operator==(const SymbolTable& o) const {
  if (symbols_.size() != o.symbols_.size()) return false;
  for (size_t i = 0; i < symbols_.size(); ++i)
    if (symbols_[i].name != o.symbols_[i].name || symbols_[i].odd != o.symbols_[i].odd ||
        symbols_[i].weight != o.symbols_[i].weight)
      return false;
  return true;
}

GradedPoly GradedPoly::constant(SymbolTablePtr table, const CRational& c, int cap) {
  GradedPoly p(std::move(table), cap);
  p.add_term(Monomial{}, c);
  return p;
}

GradedPoly GradedPoly::symbol(SymbolTablePtr table, const std::string& name, int cap) {
  int i = table->index(name);
  return symbol(std::move(table), i, cap);
}

GradedPoly GradedPoly::symbol(SymbolTablePtr table, int index, int cap) {
  if (index < 0 || index >= table->size()) throw SchemaError("symbol index out of range");
  Monomial m;
  m.exp[index] = 1;
  if ((*table)[index].odd) m.odd = Mask(1) << index;
  GradedPoly p(std::move(table), cap);
  p.add_term(m, CRational(1));
  return p;
}

GradedPoly GradedPoly::alpha_power(SymbolTablePtr table, int alpha2, int cap) {
  Monomial m;
  m.alpha2 = alpha2;
  GradedPoly p(std::move(table), cap);
  p.add_term(m, CRational(1));
  return p;
}

int GradedPoly::degree(const Monomial& m) const {
  int d = 0;
  for (int i = 0; i < table_->size(); ++i) d += m.exp[i] * (*table_)[i].weight;
  return d;
}

int GradedPoly::min_degree() const {
  int d = kNoCap;
  for (const auto& t : terms_) d = std::min(d, degree(t.first));
  return d;
}

bool GradedPoly::mentions(int symbol) const {
  for (const auto& t : terms_)
    if (t.first.exp[symbol] != 0) return true;
  return false;
}

bool GradedPoly::is_even() const {
  for (const auto& t : terms_)
    if (t.first.is_odd()) return false;
  return true;
}

bool GradedPoly::is_odd() const {
  for (const auto& t : terms_)
    if (!t.first.is_odd()) return false;
  return true;
}

void GradedPoly::add_term(const Monomial& m, const CRational& c) {
  if (c.is_zero()) return;
  if (cap_ != kNoCap && degree(m) > cap_) return;
  auto [it, inserted] = terms_.try_emplace(m, c);
  if (!inserted) {
    it->second += c;
    if (it->second.is_zero()) terms_.erase(it);
  }
}

GradedPoly GradedPoly::truncated(int cap) const {
  GradedPoly r(table_, cap_);
  for (const auto& t : terms_)
    if (degree(t.first) <= cap) r.terms_.insert(t);
  return r;
}

GradedPoly GradedPoly::with_cap(int cap) const {
  GradedPoly r = truncated(cap);
  r.cap_ = cap;
  return r;
}

GradedPoly GradedPoly::degree_part(int d) const {
  GradedPoly r(table_, cap_);
  for (const auto& t : terms_)
    if (degree(t.first) == d) r.terms_.insert(t);
  return r;
}

GradedPoly GradedPoly::involute() const {
  GradedPoly r = *this;
  for (auto& t : r.terms_)
    if (t.first.is_odd()) t.second = -t.second;
  return r;
}

GradedPoly GradedPoly::specialize(int symbol, const CRational& value) const {
  if ((*table_)[symbol].odd) throw DomainError("cannot specialize an odd symbol to a number");
  GradedPoly r(table_, cap_);
  for (const auto& [m, c] : terms_) {
    Monomial k = m;
    int e = k.exp[symbol];
    k.exp[symbol] = 0;
    r.add_term(k, c * pow(value, e));
  }
  return r;
}

static void require_compatible(const GradedPoly& a, const GradedPoly& b) {
  if (a.table() != b.table() && !(a.table() && b.table() && *a.table() == *b.table()))
    throw SchemaError("graded polynomials use different symbol tables");
  if (a.cap() != b.cap()) throw SchemaError("graded polynomials use different degree caps");
}

GradedPoly& GradedPoly::operator+=(const GradedPoly& o) {
  if (o.terms_.empty()) return *this;
  if (!table_) {
    *this = o;
    return *this;
  }
  require_compatible(*this, o);
  for (const auto& [m, c] : o.terms_) add_term(m, c);
  return *this;
}

GradedPoly& GradedPoly::operator-=(const GradedPoly& o) {
  if (o.terms_.empty()) return *this;
  if (!table_) {
    *this = -o;
    return *this;
  }
  require_compatible(*this, o);
  for (const auto& [m, c] : o.terms_) add_term(m, -c);
  return *this;
}

GradedPoly& GradedPoly::operator*=(const CRational& c) {
  if (c.is_zero()) {
    terms_.clear();
    return *this;
  }
  for (auto& t : terms_) t.second *= c;
  return *this;
}

GradedPoly GradedPoly::operator-() const {
  GradedPoly r = *this;
  for (auto& t : r.terms_) t.second = -t.second;
  return r;
}

int monomial_product(const Monomial& m1, const Monomial& m2, Monomial& out) {
  int s = mask_product_sign(m1.odd, m2.odd);
  if (s == 0) return 0;
  for (int i = 0; i < kMaxSymbols; ++i) out.exp[i] = m1.exp[i] + m2.exp[i];
  out.odd = m1.odd | m2.odd;
  out.alpha2 = m1.alpha2 + m2.alpha2;
  return s;
}

GradedPoly operator*(const GradedPoly& a, const GradedPoly& b) {
  if (!a.table() || !b.table()) return a.table() ? GradedPoly(a.table(), a.cap()) : GradedPoly(b.table(), b.cap());
  require_compatible(a, b);
  GradedPoly r(a.table(), a.cap());
  if (a.is_zero() || b.is_zero()) return r;
  std::vector<int> da, db;
  for (const auto& t : a.terms()) da.push_back(a.degree(t.first));
  for (const auto& t : b.terms()) db.push_back(b.degree(t.first));
  Monomial m;
  size_t i = 0;
  for (const auto& [ma, ca] : a.terms()) {
    size_t j = 0;
    for (const auto& [mb, cb] : b.terms()) {
      if (a.cap() != GradedPoly::kNoCap && da[i] + db[j] > a.cap()) {
        ++j;
        continue;
      }
      ++j;
      int s = monomial_product(ma, mb, m);
      if (s == 0) continue;
      CRational c = ca * cb;
      if (s < 0) c = -c;
      r.add_term(m, c);
    }
    ++i;
  }
  return r;
}

GradedPoly poly_mul(const GradedPoly& p, const GradedPoly& q) { return p * q; }

Grassmann evaluate(const GradedPoly& p, const PolyValues& values) {
  const int L = values.generators;
  Grassmann result(L);
  std::map<int, Grassmann> alpha_cache;
  for (const auto& [m, c] : p.terms()) {
    Grassmann term = Grassmann::scalar(c, L);
    for (int i = 0; i < p.table()->size(); ++i) {
      if (m.exp[i] == 0) continue;
      if (static_cast<size_t>(i) >= values.symbols.size())
        throw SchemaError("no value supplied for symbol " + (*p.table())[i].name);
      const Grassmann& v = values.symbols[i];
      if (v.generators() != L) throw DimensionError("symbol value has wrong generator count");
      for (int e = 0; e < m.exp[i]; ++e) term = term * v;
      if (term.is_zero()) break;
    }
    if (term.is_zero()) continue;
    if (m.alpha2 != 0) {
      auto it = alpha_cache.find(m.alpha2);
      if (it == alpha_cache.end())
        it = alpha_cache.emplace(m.alpha2, gr_half_pow(values.alpha, m.alpha2, values.branch)).first;
      term = term * it->second;
    }
    result += term;
  }
  return result;
}

std::string monomial_string(const SymbolTable& table, const Monomial& m) {
  std::ostringstream os;
  bool any = false;
  if (m.alpha2 != 0) {
    os << "a0^";
    if (m.alpha2 % 2 == 0)
      os << (m.alpha2 < 0 ? "(" : "") << m.alpha2 / 2 << (m.alpha2 < 0 ? ")" : "");
    else
      os << "(" << m.alpha2 << "/2)";
    any = true;
  }
  for (int i = 0; i < table.size(); ++i) {
    if (m.exp[i] == 0) continue;
    if (any) os << "*";
    os << table[i].name;
    if (m.exp[i] > 1) os << "^" << int(m.exp[i]);
    any = true;
  }
  return any ? os.str() : "1";
}

std::string to_string(const GradedPoly& p) {
  if (p.is_zero()) return "0";
  std::ostringstream os;
  bool first = true;
  for (const auto& [m, c] : p.terms()) {
    if (!first) os << " + ";
    first = false;
    std::string mon = monomial_string(*p.table(), m);
    if (mon == "1")
      os << to_string(c);
    else if (c == CRational(1))
      os << mon;
    else
      os << "(" << to_string(c) << ")*" << mon;
  }
  return os.str();
}

}  // namespace superns
