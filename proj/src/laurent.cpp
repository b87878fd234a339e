#include "superns/laurent.hpp"

#include <algorithm>
#include <sstream>

#include "superns/errors.hpp"

namespace superns {

Laurent Laurent::monomial(const Grassmann& c, int n, Window window) {
  Laurent a(c.generators(), window);
  a.set(n, c);
  a.clamp();
  return a;
}

Grassmann Laurent::coefficient(int n) const {
  auto it = terms_.find(n);
  return it == terms_.end() ? Grassmann(L_) : it->second;
}

bool Laurent::known(int n) const {
  switch (side_) {
    case Side::exact:
      return true;
    case Side::zero:
      return n < prec_;
    case Side::infinity:
      return n > prec_;
  }
  return true;
}

int Laurent::min_exponent() const { return terms_.empty() ? INT_MAX : terms_.begin()->first; }
int Laurent::max_exponent() const { return terms_.empty() ? INT_MIN : terms_.rbegin()->first; }

void Laurent::set(int n, const Grassmann& c) {
  if (c.generators() != L_) throw DimensionError("Laurent coefficient has wrong generator count");
  if (c.is_zero())
    terms_.erase(n);
  else
    terms_[n] = c;
}

void Laurent::add(int n, const Grassmann& c) {
  if (c.is_zero()) return;
  if (!known(n)) return;
  auto it = terms_.find(n);
  if (it == terms_.end()) {
    if (c.generators() != L_) throw DimensionError("Laurent coefficient has wrong generator count");
    terms_.emplace(n, c);
  } else {
    it->second += c;
    if (it->second.is_zero()) terms_.erase(it);
  }
}

void Laurent::truncate(Side side, int prec) {
  if (side == Side::exact) return;
  if (side_ == Side::exact) {
    side_ = side;
    prec_ = prec;
  } else if (side_ != side) {
    throw TruncationError("series truncated at both zero and infinity");
  } else {
    prec_ = side == Side::zero ? std::min(prec_, prec) : std::max(prec_, prec);
  }
  if (side_ == Side::zero)
    terms_.erase(terms_.lower_bound(prec_), terms_.end());
  else
    terms_.erase(terms_.begin(), terms_.upper_bound(prec_));
}

Laurent Laurent::with_window(Window w) const {
  Laurent r = *this;
  r.window_ = w;
  r.clamp();
  return r;
}

void Laurent::clamp() {
  const int lo = window_.lo, hi = window_.hi;
  if (side_ == Side::exact) {
    bool above = max_exponent() > hi && !terms_.empty();
    bool below = min_exponent() < lo && !terms_.empty();
    if (above && below) throw TruncationError("exact series exceeds the window on both ends");
    if (above) truncate(Side::zero, hi + 1);
    if (below) truncate(Side::infinity, lo - 1);
    return;
  }
  if (side_ == Side::zero) {
    if (prec_ > hi + 1) prec_ = hi + 1;
    terms_.erase(terms_.lower_bound(prec_), terms_.end());
    if (!terms_.empty() && min_exponent() < lo)
      throw TruncationError("window underflow: z^" + std::to_string(min_exponent()) + " below window");
  } else {
    if (prec_ < lo - 1) prec_ = lo - 1;
    terms_.erase(terms_.begin(), terms_.upper_bound(prec_));
    if (!terms_.empty() && max_exponent() > hi)
      throw TruncationError("window overflow: z^" + std::to_string(max_exponent()) + " above window");
  }
}

Laurent Laurent::involute() const {
  Laurent r = *this;
  for (auto& [n, c] : r.terms_) c = c.involute();
  return r;
}

Laurent Laurent::derivative() const {
  Laurent r(L_, window_);
  r.side_ = side_;
  r.prec_ = prec_ - 1;
  for (const auto& [n, c] : terms_)
    if (n != 0) r.terms_.emplace(n - 1, c * CRational(n));
  r.clamp();
  return r;
}

bool Laurent::is_even() const {
  return std::all_of(terms_.begin(), terms_.end(), [](const auto& t) { return t.second.is_even(); });
}

bool Laurent::is_odd() const {
  return std::all_of(terms_.begin(), terms_.end(), [](const auto& t) { return t.second.is_odd(); });
}

static void require_same(const Laurent& a, const Laurent& b) {
  if (a.generators() != b.generators()) throw DimensionError("Laurent generator counts differ");
  if (!(a.window() == b.window())) throw TruncationError("Laurent windows differ");
}

static Laurent add_impl(const Laurent& a, const Laurent& b, bool subtract) {
  require_same(a, b);
  Laurent r = a;
  r.truncate(b.side(), b.prec());
  for (const auto& [n, c] : b.terms()) r.add(n, subtract ? -c : c);
  return r;
}

Laurent& Laurent::operator+=(const Laurent& o) { return *this = add_impl(*this, o, false); }
Laurent& Laurent::operator-=(const Laurent& o) { return *this = add_impl(*this, o, true); }

Laurent Laurent::operator-() const {
  Laurent r = *this;
  for (auto& t : r.terms_) t.second = -t.second;
  return r;
}

Laurent operator*(const Laurent& a, const Laurent& b) {
  require_same(a, b);
  Laurent r(a.L_, a.window_);
  if ((a.is_exact() && a.known_zero()) || (b.is_exact() && b.known_zero())) return r;
  Side side = Side::exact;
  int prec = 0;
  if (!a.is_exact() || !b.is_exact()) {
    side = a.is_exact() ? b.side_ : a.side_;
    if (!a.is_exact() && !b.is_exact() && a.side_ != b.side_)
      throw TruncationError("product of series expanded at zero and at infinity");
    if (side == Side::zero) {
      auto val = [](const Laurent& x) { return x.terms_.empty() ? x.prec_ : x.min_exponent(); };
      prec = INT_MAX;
      if (!a.is_exact()) prec = std::min(prec, val(b) + a.prec_);
      if (!b.is_exact()) prec = std::min(prec, val(a) + b.prec_);
    } else {
      auto top = [](const Laurent& x) { return x.terms_.empty() ? x.prec_ : x.max_exponent(); };
      prec = INT_MIN;
      if (!a.is_exact()) prec = std::max(prec, top(b) + a.prec_);
      if (!b.is_exact()) prec = std::max(prec, top(a) + b.prec_);
    }
    r.side_ = side;
    r.prec_ = prec;
  }
  for (const auto& [na, ca] : a.terms_)
    for (const auto& [nb, cb] : b.terms_) {
      int n = na + nb;
      if (!r.known(n)) continue;
      if (side == Side::zero && n > a.window_.hi) continue;
      if (side == Side::infinity && n < a.window_.lo) continue;
      r.add(n, ca * cb);
    }
  r.clamp();
  return r;
}

Laurent operator*(const Grassmann& c, const Laurent& a) {
  Laurent r = a;
  r.terms_.clear();
  for (const auto& [n, x] : a.terms_) r.add(n, c * x);
  return r;
}

Laurent operator*(const Laurent& a, const Grassmann& c) {
  Laurent r = a;
  r.terms_.clear();
  for (const auto& [n, x] : a.terms_) r.add(n, x * c);
  return r;
}

Laurent shift(const Laurent& a, int k) {
  Laurent r(a.generators(), {a.window().lo + k, a.window().hi + k});
  for (const auto& [n, c] : a.terms()) r.set(n + k, c);
  if (!a.is_exact()) r.truncate(a.side(), a.prec() + k);
  r.clamp();
  return r;
}

namespace {

// z -> 1/z on exponents, sides and window.
Laurent reflect(const Laurent& a) {
  Window w{-a.window().hi, -a.window().lo};
  Laurent r(a.generators(), w);
  for (const auto& [n, c] : a.terms()) r.set(-n, c);
  if (a.side() == Side::zero) r.truncate(Side::infinity, -a.prec());
  if (a.side() == Side::infinity) r.truncate(Side::zero, -a.prec());
  return r;
}

struct Leading {
  int k;
  Grassmann c;
  Laurent nil;   // nilpotent terms below k
  Laurent unit;  // u with G0 = c z^k (1 + u)
};

// Split an even-valued series around its lowest invertible term.
Leading split_leading(const Laurent& g) {
  const int L = g.generators();
  Leading s{0, Grassmann(L), Laurent(L, g.window()), Laurent(L, g.window())};
  bool found = false;
  for (const auto& [n, c] : g.terms()) {
    if (!c.body().is_zero()) {
      s.k = n;
      s.c = c;
      found = true;
      break;
    }
    s.nil.set(n, c);
  }
  if (!found) throw NotInvertibleError("series has no term with invertible body");
  Grassmann cinv = gr_inverse(s.c);
  Window wide{g.window().lo - s.k, g.window().hi - s.k};
  Laurent u(L, wide);
  for (const auto& [n, c] : g.terms())
    if (n > s.k) u.set(n - s.k, cinv * c);
  if (!g.is_exact()) u.truncate(g.side(), g.prec() - s.k);
  s.unit = u;
  return s;
}

// Σ_j coeff(j) u^j for u with exponents >= 1, in u's window.
template <class CoeffFn>
Laurent unit_series(const Laurent& u, CoeffFn coeff) {
  Laurent result = Laurent::constant(Grassmann::scalar(coeff(0), u.generators()), u.window());
  if (u.known_zero()) {
    result.truncate(u.side(), u.prec());
    return result;
  }
  Laurent power = result;
  for (long j = 1;; ++j) {
    power = power * u;
    CRational cj = coeff(j);
    result += power * Grassmann::scalar(cj, u.generators());
    if (power.known_zero()) break;
    if (j > 4 * (u.window().hi - u.window().lo) + 64) throw TruncationError("unit series did not terminate");
  }
  return result;
}

Laurent geometric_inverse(const Leading& s, Window w) {
  // c^{-1} z^{-k} Σ (-u)^j
  Laurent u = s.unit.with_window({std::min(0, w.lo + s.k), w.hi + s.k});
  Laurent S = unit_series(u, [](long j) { return CRational(j % 2 ? -1 : 1); });
  Laurent r = shift(S.with_window({w.lo + s.k, w.hi + s.k}), -s.k).with_window(w);
  return gr_inverse(s.c) * r;
}

int nil_headroom(const Leading& s) {
  if (s.nil.known_zero()) return 0;
  return s.nil.generators() * std::max(0, -s.nil.min_exponent()) + std::max(0, s.k - s.nil.min_exponent());
}

Laurent inverse_zero(const Laurent& a) {
  if (!a.is_even()) throw DomainError("inverse of a series with odd coefficients");
  Leading s = split_leading(a);
  const Window w = a.window();
  const int H = nil_headroom(s);
  Window wide{w.lo - H, w.hi + H};
  Laurent g0inv = geometric_inverse(s, wide);
  // 1/(G0 + s) = Σ (-s)^m G0^{-m-1}
  Laurent nil = s.nil.with_window(wide);
  Laurent result = g0inv;
  Laurent term = g0inv;
  for (int m = 1; m <= a.generators() + 1; ++m) {
    term = -(nil * term * g0inv);
    if (term.known_zero() && term.is_exact()) break;
    result += term;
    if (term.known_zero()) break;
  }
  return result.with_window(w);
}

// F(G) with G oriented at zero (leading term = lowest invertible exponent).
Laurent compose_zero(const Laurent& F, const Laurent& G) {
  if (!G.is_even()) throw DomainError("composition with an odd-valued inner series");
  const int L = F.generators();
  const Window w = F.window();
  Leading s = split_leading(G);
  const bool monomial = s.unit.known_zero() && s.unit.is_exact();
  const int H = nil_headroom(s);
  Window wide{w.lo - H - std::abs(s.k), w.hi + H + std::abs(s.k)};
  if (s.k == 0 && !(F.is_exact() && F.min_exponent() >= 0))
    throw TruncationError("composition with a series of order zero needs an exact polynomial");

  // powers of G0 = c z^k (1 + u)
  Laurent g0 = s.c * shift(Laurent::constant(Grassmann::scalar(1, L), {wide.lo - s.k, wide.hi - s.k}) +
                               s.unit.with_window({wide.lo - s.k, wide.hi - s.k}),
                           s.k)
                         .with_window(wide);
  std::map<int, Laurent> powers;
  powers.emplace(0, Laurent::constant(Grassmann::scalar(1, L), wide));
  auto power = [&](int n) -> const Laurent& {
    auto it = powers.find(n);
    if (it != powers.end()) return it->second;
    if (n > 0) {
      for (int j = 1; j <= n; ++j)
        if (!powers.count(j)) powers.emplace(j, powers.at(j - 1) * g0);
    } else {
      if (!powers.count(-1)) powers.emplace(-1, geometric_inverse(s, wide));
      for (int j = 2; j <= -n; ++j)
        if (!powers.count(-j)) powers.emplace(-j, powers.at(-j + 1) * powers.at(-1));
    }
    return powers.at(n);
  };

  Laurent nil = s.nil.with_window(wide);
  Laurent nil_power = Laurent::constant(Grassmann::scalar(1, L), wide);
  Laurent Fm = F.with_window({F.window().lo - 64, F.window().hi + 64});
  Laurent result(L, wide);
  Rational factorial(1);
  for (int m = 0;; ++m) {
    if (m > 0) {
      Fm = Fm.derivative();
      nil_power = nil_power * nil;
      factorial *= m;
      if (nil_power.known_zero() && nil_power.is_exact()) break;
    }
    Laurent value(L, wide);
    for (const auto& [n, c] : Fm.terms()) value += c * power(n);
    if (!Fm.is_exact()) {
      const int p = Fm.prec();
      const bool up = (Fm.side() == Side::zero) == (s.k > 0);
      if (up)
        value.truncate(Side::zero, s.k * p);
      else if (monomial)
        value.truncate(Side::infinity, s.k * p);
      else
        throw TruncationError("composition loses all precision (expansion sides are incompatible)");
    }
    result += nil_power * value * Grassmann::scalar(CRational(1 / factorial), L);
    if (m > L + 1) break;
  }
  return result.with_window(w);
}

}  // namespace

Laurent inverse(const Laurent& a) {
  if (a.side() == Side::infinity) return reflect(inverse_zero(reflect(a)));
  return inverse_zero(a);
}

Laurent pow(const Laurent& a, long n) {
  if (n < 0) return pow(inverse(a), -n);
  Laurent result = Laurent::constant(Grassmann::scalar(1, a.generators()), a.window()), base = a;
  while (n > 0) {
    if (n & 1) result = result * base;
    n >>= 1;
    if (n > 0) base = base * base;
  }
  return result;
}

Laurent sqrt(const Laurent& a, Branch branch) {
  if (a.side() == Side::infinity) return reflect(sqrt(reflect(a), branch));
  if (!a.is_even()) throw DomainError("square root of a series with odd coefficients");
  Leading s = split_leading(a);
  if (!s.nil.known_zero()) throw DomainError("square root of a series with nilpotent terms below the leading order");
  if (s.k % 2 != 0) throw DomainError("square root of a series with odd leading exponent");
  const Window w = a.window();
  Laurent u = s.unit.with_window({std::min(0, w.lo - s.k / 2), w.hi - s.k / 2});
  Laurent S = unit_series(u, [](long j) {
    Rational c(1);
    for (long i = 0; i < j; ++i) c *= Rational(1, 2) - i;
    for (long i = 2; i <= j; ++i) c /= i;
    return CRational(c);
  });
  Laurent r = shift(S.with_window({w.lo - s.k / 2, w.hi - s.k / 2}), s.k / 2).with_window(w);
  return gr_sqrt(s.c, branch) * r;
}

Laurent compose(const Laurent& F, const Laurent& g) {
  if (F.generators() != g.generators()) throw DimensionError("Laurent generator counts differ");
  bool at_infinity = g.side() == Side::infinity || (g.is_exact() && F.side() == Side::infinity);
  Laurent gg = g.with_window(F.window());
  if (!at_infinity) return compose_zero(F, gg);
  const Window w = F.window();
  const int M = std::max(std::abs(w.lo), std::abs(w.hi));
  Laurent r = compose_zero(F.with_window({-M, M}), reflect(gg.with_window({-M, M})));
  return reflect(r).with_window(w);
}

Grassmann evaluate(const Laurent& F, const Grassmann& x) {
  Grassmann r(F.generators());
  for (const auto& [n, c] : F.terms()) {
    if (n < 0 && x.body().is_zero()) throw DomainError("evaluation at zero body of a series with poles");
    r += c * gr_pow(x, n);
  }
  return r;
}

std::string to_string(const Laurent& a) {
  std::ostringstream os;
  bool first = true;
  for (const auto& [n, c] : a.terms()) {
    if (!first) os << " + ";
    first = false;
    os << "(" << to_string(c) << ")";
    if (n != 0) os << "*z^" << n;
  }
  if (first) os << "0";
  if (a.side() == Side::zero) os << " + O(z^" << a.prec() << ")";
  if (a.side() == Side::infinity) os << " + O(z^" << a.prec() << " at inf)";
  return os.str();
}

}  // namespace superns
