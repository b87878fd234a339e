#include "superns/vosa.hpp"

#include <omp.h>

#include <algorithm>
#include <mutex>
#include <sstream>

#include "superns/errors.hpp"

namespace superns {

// ---------------------------------------------------------------- δ-calculus

Rational binomial(long n, long k) {
  if (k < 0) return 0;
  mpz_class r;
  if (n >= 0) {
    if (k > n) return 0;
    mpz_bin_uiui(r.get_mpz_t(), static_cast<unsigned long>(n), static_cast<unsigned long>(k));
    return Rational(r);
  }
  // C(n, k) = (−1)^k C(k − n − 1, k)
  mpz_bin_uiui(r.get_mpz_t(), static_cast<unsigned long>(k - n - 1), static_cast<unsigned long>(k));
  return Rational(k % 2 == 0 ? r : mpz_class(-r));
}

Rational DeltaSeries::coefficient(const DeltaMonomial& m) const {
  auto it = coeffs.find(m);
  return it == coeffs.end() ? Rational(0) : it->second;
}

namespace {

Rational sgn_pow(long k) { return (k % 2 == 0) ? Rational(1) : Rational(-1); }

bool in_window(const DeltaMonomial& m, int w) {
  return std::abs(m.a) <= w && std::abs(m.b) <= w && std::abs(m.c) <= w;
}

void put(DeltaSeries& s, const DeltaMonomial& m, const Rational& v) {
  if (sgn(v) == 0 || !in_window(m, s.window)) return;
  Rational& slot = s.coeffs[m];
  slot += v;
  if (sgn(slot) == 0) s.coeffs.erase(m);
}

}  // namespace

Rational delta_coefficient(DeltaVariant v, const DeltaMonomial& m) {
  if (m.phi1 != m.phi2) return 0;
  const bool pp = m.phi1;
  switch (v) {
    case DeltaVariant::plain:
      return (!pp && m.a == 0 && m.c == 0) ? Rational(1) : Rational(0);
    case DeltaVariant::jacobi_first: {
      // Σ x0^{−n−1} [(x1 − x2)ⁿ − n φ1φ2 (x1 − x2)^{n−1}]
      const long n = -static_cast<long>(m.a) - 1;
      if (m.c < 0) return 0;
      if (!pp) return m.b + m.c == n ? binomial(n, m.c) * sgn_pow(m.c) : Rational(0);
      return m.b + m.c == n - 1 ? Rational(-n) * binomial(n - 1, m.c) * sgn_pow(m.c) : Rational(0);
    }
    case DeltaVariant::jacobi_second: {
      // Σ (−1)ⁿ x0^{−n−1} [(x2 − x1)ⁿ + n φ1φ2 (x2 − x1)^{n−1}]
      const long n = -static_cast<long>(m.a) - 1;
      if (m.b < 0) return 0;
      if (!pp) return m.b + m.c == n ? sgn_pow(n) * binomial(n, m.b) * sgn_pow(m.b) : Rational(0);
      return m.b + m.c == n - 1 ? sgn_pow(n) * Rational(n) * binomial(n - 1, m.b) * sgn_pow(m.b) : Rational(0);
    }
    case DeltaVariant::jacobi_third: {
      // Σ x2^{−n−1} [(x1 − x0)ⁿ − n φ1φ2 (x1 − x0)^{n−1}]
      const long n = -static_cast<long>(m.c) - 1;
      if (m.a < 0) return 0;
      if (!pp) return m.a + m.b == n ? binomial(n, m.a) * sgn_pow(m.a) : Rational(0);
      return m.a + m.b == n - 1 ? Rational(-n) * binomial(n - 1, m.a) * sgn_pow(m.a) : Rational(0);
    }
    case DeltaVariant::shifted:
    case DeltaVariant::shifted_split:
      return delta_expand(v, std::max({std::abs(m.a), std::abs(m.b), std::abs(m.c)})).coefficient(m);
  }
  return 0;
}

DeltaSeries delta_expand(DeltaVariant v, int window) {
  if (window < 0) throw DomainError("negative δ window");
  DeltaSeries s;
  s.window = window;
  switch (v) {
    case DeltaVariant::plain:
      for (int b = -window; b <= window; ++b) put(s, {0, b, 0, false, false}, 1);
      break;
    case DeltaVariant::shifted:
      // x0^{−n} Σ_k C(n,k) x1^{n−k} (−1)^k (x2 + φ1φ2)^k
      for (int n = -window; n <= window; ++n)
        for (int k = 0; n - k >= -window && k - 1 <= window; ++k) {
          Rational ck = binomial(n, k) * sgn_pow(k);
          put(s, {-n, n - k, k, false, false}, ck);
          if (k > 0) put(s, {-n, n - k, k - 1, true, true}, ck * k);
        }
      break;
    case DeltaVariant::shifted_split:
      for (int n = -window; n <= window; ++n) {
        for (int k = 0; n - k >= -window && k <= window; ++k)
          put(s, {-n, n - k, k, false, false}, binomial(n, k) * sgn_pow(k));
        // −φ1φ2 x0⁻¹ δ′ contributes −n φ1φ2 x0^{−n} (x1 − x2)^{n−1}
        for (int k = 0; n - 1 - k >= -window && k <= window; ++k)
          put(s, {-n, n - 1 - k, k, true, true}, Rational(-n) * binomial(n - 1, k) * sgn_pow(k));
      }
      break;
    case DeltaVariant::jacobi_first:
    case DeltaVariant::jacobi_second:
    case DeltaVariant::jacobi_third:
      for (int a = -window; a <= window; ++a)
        for (int b = -window; b <= window; ++b)
          for (int c = -window; c <= window; ++c)
            for (bool pp : {false, true}) put(s, {a, b, c, pp, pp}, delta_coefficient(v, {a, b, c, pp, pp}));
      break;
  }
  return s;
}

DeltaSeries shift_power(int n, int window) {
  DeltaSeries s;
  s.window = window;
  put(s, {0, n, 0, false, false}, 1);
  put(s, {0, n - 1, 0, true, true}, n);
  return s;
}

// ---------------------------------------------------------------- vertex data

bool VertexData::has_mode(int label, int n2) const {
  if (label < 0 || label >= space.size()) return false;
  if (n2 % 2 == 0) return true;
  return odd_variables() && space.weight2[label] <= phi_label_cap2;
}

const SparseMat* VertexData::mode(int label, int n2) const {
  const auto& m = modes.at(label);
  auto it = m.find(n2);
  return it == m.end() ? nullptr : &it->second;
}

void VertexData::validate() const {
  space.validate();
  if (static_cast<int>(modes.size()) != space.size()) throw SchemaError("vertex data: one mode table per basis label");
  if (space.max_weight2() > weight_cap2) throw SchemaError("vertex data: basis exceeds the weight cap");
  if (vacuum.empty() || vec_weight2(space, vacuum) != 0 || vec_parity(space, vacuum) != 0)
    throw SchemaError("vertex data: vacuum must be even of weight 0");
  if (tau.empty() || vec_weight2(space, tau) != 3 || vec_parity(space, tau) != 1)
    throw SchemaError("vertex data: τ must be odd of weight 3/2");
  for (int v = 0; v < space.size(); ++v)
    for (const auto& [n2, mat] : modes[v]) {
      if (!has_mode(v, n2)) throw SchemaError("vertex data: φ-mode on a label above the φ cap");
      const int shift = mode_weight2(v, n2);
      const int par = (space.parity[v] + (n2 % 2 != 0 ? 1 : 0)) % 2;
      for (const auto& [j, col] : mat)
        for (const auto& [i, x] : col) {
          if (space.weight2[i] != space.weight2[j] + shift)
            throw SchemaError("vertex data: mode " + space.labels[v] + " breaks the weight grading");
          if ((space.parity[i] + space.parity[j]) % 2 != par)
            throw SchemaError("vertex data: mode " + space.labels[v] + " breaks the sign grading");
        }
    }
}

bool add_mode(const VertexData& V, int label, int n2, const Rational& coeff, const SparseVec& w, SparseVec& out) {
  if (w.empty() || sgn(coeff) == 0) return true;
  if (!V.has_mode(label, n2)) return false;
  const SparseMat* m = V.mode(label, n2);
  const int shift = V.mode_weight2(label, n2);
  for (const auto& [j, x] : w) {
    const int ow = V.space.weight2[j] + shift;
    if (ow < 0) continue;
    if (ow > V.weight_cap2) return false;
    if (!m) continue;
    auto it = m->find(j);
    if (it != m->end()) axpy(out, coeff * x, it->second);
  }
  return true;
}

bool add_mode(const VertexData& V, const SparseVec& u, int n2, const Rational& coeff, const SparseVec& w,
              SparseVec& out) {
  for (const auto& [k, x] : u)
    if (!add_mode(V, k, n2, coeff * x, w, out)) return false;
  return true;
}

bool add_ns(const VertexData& V, const NSGen& g, const Rational& coeff, const SparseVec& w, SparseVec& out) {
  switch (g.kind) {
    case NSGen::Kind::C:
      axpy(out, coeff * V.c, w);
      return true;
    case NSGen::Kind::G:
      return add_mode(V, V.tau, g.twice + 1, coeff, w, out);
    case NSGen::Kind::L:
      if (V.odd_variables()) return add_mode(V, V.tau, g.twice + 1, coeff / 2, w, out);
      {
        // 2L(n) = (G(−½)τ)_{n+1} without odd variables
        SparseVec gt;
        if (!add_mode(V, V.tau, 0, 1, V.tau, gt)) return false;
        return add_mode(V, gt, g.twice + 2, coeff / 2, w, out);
      }
  }
  return false;
}

SparseVec apply_ns(const VertexData& V, const NSGen& g, const SparseVec& w) {
  SparseVec out;
  if (!add_ns(V, g, 1, w, out)) throw TruncationError(to_string(g) + " leaves the truncated space");
  return out;
}

// ---------------------------------------------------------------- fixture

namespace {

struct FockState {
  std::vector<int> bos;   // parts n of α(−n), descending
  std::vector<int> fer2;  // 2r for ψ(−r), descending
  auto operator<=>(const FockState&) const = default;
};

int fock_weight2(const FockState& s) {
  int w = 0;
  for (int n : s.bos) w += 2 * n;
  for (int r : s.fer2) w += r;
  return w;
}

std::string fock_label(const FockState& s) {
  if (s.bos.empty() && s.fer2.empty()) return "1";
  std::string out;
  auto sep = [&] {
    if (!out.empty()) out += ".";
  };
  for (int n : s.bos) {
    sep();
    out += "a-" + std::to_string(n);
  }
  for (int r : s.fer2) {
    sep();
    out += "f-" + std::to_string(r) + "/2";
  }
  return out;
}

void partitions(int n, int max_part, std::vector<int>& cur, std::vector<std::vector<int>>& out) {
  if (n == 0) {
    out.push_back(cur);
    return;
  }
  for (int p = std::min(n, max_part); p >= 1; --p) {
    cur.push_back(p);
    partitions(n - p, p, cur, out);
    cur.pop_back();
  }
}

// distinct odd parts
void odd_partitions(int n, int max_part, std::vector<int>& cur, std::vector<std::vector<int>>& out) {
  if (n == 0) {
    out.push_back(cur);
    return;
  }
  for (int p = std::min(n, max_part); p >= 1; --p) {
    if (p % 2 == 0) continue;
    cur.push_back(p);
    odd_partitions(n - p, p - 2, cur, out);
    cur.pop_back();
  }
}

struct FockBasis {
  int cap2 = 0;
  std::vector<FockState> states;
  std::map<FockState, int> index;
  GradedSpace space;
};

FockBasis build_fock_basis(int cap2) {
  FockBasis fb;
  fb.cap2 = cap2;
  for (int b2 = 0; b2 <= cap2; b2 += 2) {
    std::vector<std::vector<int>> bos, cur_out;
    std::vector<int> cur;
    partitions(b2 / 2, b2 / 2, cur, bos);
    for (const auto& bp : bos)
      for (int f2 = 0; b2 + f2 <= cap2; ++f2) {
        std::vector<std::vector<int>> fers;
        odd_partitions(f2, f2, cur, fers);
        for (const auto& fp : fers) fb.states.push_back({bp, fp});
      }
  }
  std::sort(fb.states.begin(), fb.states.end(), [](const FockState& x, const FockState& y) {
    const int wx = fock_weight2(x), wy = fock_weight2(y);
    if (wx != wy) return wx < wy;
    const int px = static_cast<int>(x.fer2.size() % 2), py = static_cast<int>(y.fer2.size() % 2);
    if (px != py) return px < py;
    return x < y;
  });
  for (size_t i = 0; i < fb.states.size(); ++i) {
    const FockState& s = fb.states[i];
    fb.index[s] = static_cast<int>(i);
    fb.space.weight2.push_back(fock_weight2(s));
    fb.space.parity.push_back(static_cast<int>(s.fer2.size() % 2));
    fb.space.labels.push_back(fock_label(s));
  }
  return fb;
}

const FockBasis& fock_basis(int cap2) {
  static std::mutex mu;
  static std::map<int, FockBasis> cache;
  std::lock_guard<std::mutex> lock(mu);
  auto it = cache.find(cap2);
  if (it == cache.end()) it = cache.emplace(cap2, build_fock_basis(cap2)).first;
  return it->second;
}

// α(n) on a basis state
void boson_on(const FockBasis& fb, int n, int j, const Rational& coeff, SparseVec& out) {
  if (n == 0) return;
  FockState s = fb.states[j];
  if (n < 0) {
    s.bos.insert(std::upper_bound(s.bos.begin(), s.bos.end(), -n, std::greater<int>()), -n);
    auto it = fb.index.find(s);
    if (it == fb.index.end()) throw TruncationError("boson mode leaves the truncated Fock space");
    axpy(out, coeff, basis_vec(it->second));
    return;
  }
  auto pos = std::find(s.bos.begin(), s.bos.end(), n);
  if (pos == s.bos.end()) return;
  const long mult = std::count(s.bos.begin(), s.bos.end(), n);
  s.bos.erase(pos);
  axpy(out, coeff * Rational(n * mult), basis_vec(fb.index.at(s)));
}

// ψ(r), r = twice_r/2, on a basis state
void fermion_on(const FockBasis& fb, int twice_r, int j, const Rational& coeff, SparseVec& out) {
  FockState s = fb.states[j];
  const int r = std::abs(twice_r);
  auto pos = std::find(s.fer2.begin(), s.fer2.end(), r);
  if (twice_r < 0) {
    if (pos != s.fer2.end()) return;
    auto ins = std::upper_bound(s.fer2.begin(), s.fer2.end(), r, std::greater<int>());
    const long before = ins - s.fer2.begin();
    s.fer2.insert(ins, r);
    auto it = fb.index.find(s);
    if (it == fb.index.end()) throw TruncationError("fermion mode leaves the truncated Fock space");
    axpy(out, before % 2 == 0 ? coeff : Rational(-coeff), basis_vec(it->second));
    return;
  }
  if (pos == s.fer2.end()) return;
  const long before = pos - s.fer2.begin();
  s.fer2.erase(pos);
  axpy(out, before % 2 == 0 ? coeff : Rational(-coeff), basis_vec(fb.index.at(s)));
}

}  // namespace

SparseVec fock_boson(const VertexData& V, int n, const SparseVec& w) {
  const FockBasis& fb = fock_basis(V.weight_cap2);
  SparseVec out;
  for (const auto& [j, x] : w) boson_on(fb, n, j, x, out);
  return out;
}

SparseVec fock_fermion(const VertexData& V, int twice_r, const SparseVec& w) {
  if (twice_r % 2 == 0) throw DomainError("fermion modes are half-integral");
  const FockBasis& fb = fock_basis(V.weight_cap2);
  SparseVec out;
  for (const auto& [j, x] : w) fermion_on(fb, twice_r, j, x, out);
  return out;
}

VertexData fixture_boson_fermion(int weight_cap2, bool odd_variables) {
  if (weight_cap2 < 4) throw DomainError("fixture needs weight cap at least 2 to hold τ and L(−2)1");
  const FockBasis& fb = fock_basis(weight_cap2);
  VertexData V;
  V.space = fb.space;
  V.weight_cap2 = weight_cap2;
  const int N = V.space.size();
  V.modes.assign(N, {});
  const int vac = fb.index.at(FockState{});
  const int a = fb.index.at(FockState{{1}, {}});
  const int f = fb.index.at(FockState{{}, {1}});
  V.vacuum = basis_vec(vac);
  V.tau = basis_vec(fb.index.at(FockState{{1}, {1}}));

  // 1_{(−1)} = id
  for (int j = 0; j < N; ++j) V.modes[vac][-2][j] = basis_vec(j);
  // a_{(n)} = α(n), f_{(n)} = ψ(n + ½)
  for (int j = 0; j < N; ++j)
    for (int n = -weight_cap2; n <= weight_cap2; ++n) {
      SparseVec col;
      const int ow_a = V.space.weight2[j] - 2 * n;
      if (ow_a >= 0 && ow_a <= weight_cap2) {
        boson_on(fb, n, j, 1, col);
        if (!col.empty()) V.modes[a][2 * n][j] = col;
      }
      col.clear();
      const int ow_f = V.space.weight2[j] - 2 * n - 1;
      if (ow_f >= 0 && ow_f <= weight_cap2) {
        fermion_on(fb, 2 * n + 1, j, 1, col);
        if (!col.empty()) V.modes[f][2 * n][j] = col;
      }
    }

  // (g_{(m)} b)_{(n)} = Σ_i (−1)^i C(m,i) [g_{(m−i)} b_{(n+i)} − (−1)^m ε b_{(m+n−i)} g_{(i)}]
  // Basis labels are sorted by weight, so b is always done before v.
  for (int v = 0; v < N; ++v) {
    if (v == vac || v == a || v == f) continue;
    FockState rest = fb.states[v];
    int g, m;
    if (!rest.bos.empty()) {
      g = a;
      m = -rest.bos.front();
      rest.bos.erase(rest.bos.begin());
    } else {
      g = f;
      m = -(rest.fer2.front() + 1) / 2;
      rest.fer2.erase(rest.fer2.begin());
    }
    const int b = fb.index.at(rest);
    const int wg2 = V.space.weight2[g], wb2 = V.space.weight2[b], wv2 = V.space.weight2[v];
    const Rational eps = (V.space.parity[g] && V.space.parity[b]) ? -1 : 1;
    const Rational sm = (m % 2 == 0) ? 1 : -1;
    for (int j = 0; j < N; ++j) {
      const SparseVec w = basis_vec(j);
      const int ww2 = V.space.weight2[j];
      for (int n = -weight_cap2 - 2; n <= weight_cap2 + 2; ++n) {
        const int ow = wv2 + ww2 - 2 * n - 2;
        if (ow < 0 || ow > weight_cap2) continue;
        SparseVec col;
        for (int i = 0; wb2 + ww2 - 2 * (n + i) - 2 >= 0; ++i) {
          SparseVec t;
          if (!add_mode(V, b, 2 * (n + i), 1, w, t)) throw std::logic_error("iterate formula left the cap");
          if (!add_mode(V, g, 2 * (m - i), binomial(m, i) * sgn_pow(i), t, col))
            throw std::logic_error("iterate formula left the cap");
        }
        for (int i = 0; wg2 + ww2 - 2 * i - 2 >= 0; ++i) {
          SparseVec t;
          if (!add_mode(V, g, 2 * i, 1, w, t)) throw std::logic_error("iterate formula left the cap");
          if (!add_mode(V, b, 2 * (m + n - i), -binomial(m, i) * sgn_pow(i) * sm * eps, t, col))
            throw std::logic_error("iterate formula left the cap");
        }
        if (!col.empty()) V.modes[v][2 * n][j] = std::move(col);
      }
    }
  }
  V.c = central_charge(V).first;
  return odd_variables ? convert_F2(V) : V;
}

// ---------------------------------------------------------------- functors

VertexData convert_F2(const VertexData& V) {
  if (V.odd_variables()) throw DomainError("F2 expects vertex data without odd variables");
  VertexData out = V;
  out.phi_label_cap2 = V.weight_cap2 - 1;
  for (int v = 0; v < V.space.size(); ++v) {
    if (V.space.weight2[v] > out.phi_label_cap2) continue;
    // v_{n−½} = (G(−½)v)_n
    SparseVec gv;
    if (!add_mode(V, V.tau, 0, 1, basis_vec(v), gv)) throw TruncationError("G(−½) leaves the truncated space");
    std::map<int, SparseMat> phi;
    for (const auto& [k, x] : gv)
      for (const auto& [n2, mat] : V.modes[k])
        for (const auto& [j, col] : mat) {
          SparseVec& dst = phi[n2 - 1][j];
          axpy(dst, x, col);
          if (dst.empty()) phi[n2 - 1].erase(j);
        }
    for (auto& [n2, mat] : phi)
      if (!mat.empty()) out.modes[v][n2] = std::move(mat);
  }
  return out;
}

VertexData convert_F1(const VertexData& V) {
  if (!V.odd_variables()) throw DomainError("F1 expects vertex data with odd variables");
  VertexData out = V;
  out.phi_label_cap2 = -1;
  for (auto& m : out.modes)
    for (auto it = m.begin(); it != m.end();) it = (it->first % 2 != 0) ? m.erase(it) : std::next(it);
  return out;
}

VertexData automorphism_J(const VertexData& V) {
  VertexData out = V;
  for (auto& [i, x] : out.tau) x = -x;
  if (V.odd_variables())
    for (auto& m : out.modes)
      for (auto& [n2, mat] : m)
        if (n2 % 2 != 0)
          for (auto& [j, col] : mat)
            for (auto& [i, x] : col) x = -x;
  return out;
}

bool same_vertex_data(const VertexData& a, const VertexData& b, int label_cap2) {
  if (!(a.space == b.space) || a.vacuum != b.vacuum || a.tau != b.tau || a.c != b.c) return false;
  for (int v = 0; v < a.space.size(); ++v) {
    if (a.space.weight2[v] > label_cap2) continue;
    if (a.modes[v] != b.modes[v]) return false;
  }
  return true;
}

// ---------------------------------------------------------------- checks

bool all_pass(const Report& r) {
  return std::all_of(r.begin(), r.end(), [](const AxiomResult& x) { return x.pass; });
}

std::string to_string(const Report& r) {
  std::ostringstream os;
  for (const auto& x : r) {
    os << (x.pass ? "PASS " : "FAIL ") << x.axiom << " (" << x.checked << " comparisons)";
    if (!x.pass) os << ": " << x.witness;
    os << "\n";
  }
  return os.str();
}

namespace {

Rational vacuum_coefficient(const VertexData& V, const SparseVec& x) {
  // x must be a multiple of the vacuum
  if (x.empty()) return 0;
  const auto& [i0, v0] = *V.vacuum.begin();
  auto it = x.find(i0);
  if (it == x.end()) throw DomainError("expected a multiple of the vacuum");
  const Rational r = it->second / v0;
  SparseVec rest = x;
  axpy(rest, -r, V.vacuum);
  if (!rest.empty()) throw DomainError("expected a multiple of the vacuum");
  return r;
}

void fail(AxiomResult& r, const std::string& w) {
  if (r.pass) r.witness = w;
  r.pass = false;
}

std::string mode_name(const VertexData& V, int label, int n2) {
  std::string idx = (n2 % 2 == 0) ? std::to_string(n2 / 2) : to_string(frac(n2, 2));
  return "[" + V.space.labels[label] + "]_" + idx;
}

int floor_div(int a, int b) { return a >= 0 ? a / b : -((-a + b - 1) / b); }

// key of the mode multiplying x^X in component e (0: plain, 1: φ)
int key_of(int e, int X) { return 2 * (-X - 1) - e; }

}  // namespace

std::pair<Rational, Rational> central_charge(const VertexData& V) {
  const SparseVec l = apply_ns(V, NSGen::L(2), apply_ns(V, NSGen::L(-2), V.vacuum));
  const SparseVec g = apply_ns(V, NSGen::G2(3), apply_ns(V, NSGen::G2(-3), V.vacuum));
  return {vacuum_coefficient(V, l) * 2, vacuum_coefficient(V, g) * frac(3, 2)};
}

AxiomResult check_vacuum(const VertexData& V) {
  AxiomResult r{"vacuum"};
  const int vac_w = vec_weight2(V.space, V.vacuum);
  for (int e = 0; e <= (V.odd_variables() ? 1 : 0); ++e)
    for (int n2 = -V.weight_cap2 - 2 - e; n2 <= V.weight_cap2; n2 += 1) {
      if ((n2 % 2 != 0) != (e == 1)) continue;
      for (int j = 0; j < V.space.size(); ++j) {
        SparseVec out;
        if (!add_mode(V, V.vacuum, n2, 1, basis_vec(j), out)) continue;
        SparseVec want = (n2 == -2) ? basis_vec(j) : SparseVec{};
        ++r.checked;
        if (out != want) fail(r, "Y(1) mode " + std::to_string(n2) + "/2 on [" + V.space.labels[j] + "]");
      }
    }
  (void)vac_w;
  return r;
}

AxiomResult check_creation(const VertexData& V) {
  AxiomResult r{"creation"};
  for (int v = 0; v < V.space.size(); ++v)
    for (int n2 = -2; n2 <= V.space.weight2[v]; ++n2) {
      if (!V.has_mode(v, n2)) continue;
      SparseVec out;
      if (!add_mode(V, v, n2, 1, V.vacuum, out)) continue;
      const SparseVec want = (n2 == -2) ? basis_vec(v) : SparseVec{};
      ++r.checked;
      if (out != want) fail(r, mode_name(V, v, n2) + " 1 = " + to_string(V.space, out));
    }
  return r;
}

namespace {

struct JacobiCtx {
  const VertexData& V;
  int u, v;
  int pu, pv;
};

// Left side minus right side of the Jacobi identity at x0^a x1^b x2^c,
// φ-component eps (bit 0: φ1, bit 1: φ2), applied to w. False if incomplete.
bool jacobi_residual(const JacobiCtx& J, int a, int b, int c, int eps, const SparseVec& w, SparseVec& out) {
  const VertexData& V = J.V;
  const int e1 = eps & 1, e2 = (eps >> 1) & 1;
  const int ww2 = vec_weight2(V.space, w);
  const int wu2 = V.space.weight2[J.u], wv2 = V.space.weight2[J.v];
  const Rational su = J.pu ? -1 : 1, sv = J.pv ? -1 : 1;

  // first term: δ1 · Y(u,(x1,φ1)) Y(v,(x2,φ2))
  const Rational yy_sign[4] = {1, 1, su, -su};
  {
    const int cmax = floor_div(wv2 + ww2 - 1, 2) + c + 1;
    for (int cd = 0; cd <= cmax; ++cd)
      for (int p = 0; p <= 1; ++p) {
        if (p == 1 && eps != 3) continue;
        const int n = -a - 1;
        const int bd = n - p - cd;
        const Rational d = delta_coefficient(DeltaVariant::jacobi_first, {a, bd, cd, p == 1, p == 1});
        if (sgn(d) == 0) continue;
        const int f1 = p ? 0 : e1, f2 = p ? 0 : e2;
        const Rational coeff = p ? d : d * yy_sign[eps];
        SparseVec t;
        if (!add_mode(V, J.v, key_of(f2, c - cd), 1, w, t)) return false;
        if (!add_mode(V, J.u, key_of(f1, b - bd), coeff, t, out)) return false;
      }
  }
  // second term: −(−1)^{η(u)η(v)} δ2 · Y(v,(x2,φ2)) Y(u,(x1,φ1))
  const Rational yv_sign[4] = {1, sv, 1, sv};
  const Rational swap = (J.pu && J.pv) ? 1 : -1;
  {
    const int bmax = floor_div(wu2 + ww2 - 1, 2) + b + 1;
    for (int bd = 0; bd <= bmax; ++bd)
      for (int p = 0; p <= 1; ++p) {
        if (p == 1 && eps != 3) continue;
        const int n = -a - 1;
        const int cd = n - p - bd;
        const Rational d = delta_coefficient(DeltaVariant::jacobi_second, {a, bd, cd, p == 1, p == 1});
        if (sgn(d) == 0) continue;
        const int f1 = p ? 0 : e1, f2 = p ? 0 : e2;
        const Rational coeff = swap * (p ? d : d * yv_sign[eps]);
        SparseVec t;
        if (!add_mode(V, J.u, key_of(f1, b - bd), 1, w, t)) return false;
        if (!add_mode(V, J.v, key_of(f2, c - cd), coeff, t, out)) return false;
      }
  }
  // third term: δ3 · Y(Y(u,(x0,φ1−φ2))v,(x2,φ2)), subtracted
  {
    const int amax = floor_div(wu2 + wv2 - 1, 2) + a + 1;
    const SparseVec vv = basis_vec(J.v);
    for (int ad = 0; ad <= amax; ++ad)
      for (int p = 0; p <= 1; ++p) {
        if (p == 1 && eps != 3) continue;
        const int n = b + ad + p;
        const int cd = -n - 1;
        const Rational d = delta_coefficient(DeltaVariant::jacobi_third, {ad, b, cd, p == 1, p == 1});
        if (sgn(d) == 0) continue;
        const int X0 = a - ad, X2 = c - cd;
        // inner vectors u_K v and u_{K−½} v at x0^{X0}
        auto inner = [&](int e, SparseVec& y) { return add_mode(V, J.u, key_of(e, X0), 1, vv, y); };
        auto outer = [&](int e, const SparseVec& y, const Rational& k) {
          return add_mode(V, y, key_of(e, X2), -k, w, out);
        };
        SparseVec w0, w1;
        if (p == 1) {
          if (!inner(0, w0) || !outer(0, w0, d)) return false;
          continue;
        }
        switch (eps) {
          case 0:
            if (!inner(0, w0) || !outer(0, w0, d)) return false;
            break;
          case 1:
            if (!inner(1, w1) || !outer(0, w1, d)) return false;
            break;
          case 2:
            if (!inner(0, w0) || !inner(1, w1) || !outer(1, w0, d) || !outer(0, w1, -d)) return false;
            break;
          case 3:
            if (!inner(1, w1) || !outer(1, w1, d)) return false;
            break;
        }
      }
  }
  return true;
}

void jacobi_pair(const VertexData& V, int u, int v, AxiomResult& r) {
  JacobiCtx J{V, u, v, V.space.parity[u], V.space.parity[v]};
  const int wu2 = V.space.weight2[u], wv2 = V.space.weight2[v];
  const int cap2 = V.weight_cap2;
  const int a_lo = -floor_div(wu2 + wv2 + 1, 2) - 1;
  const int a_hi = floor_div(cap2 - wu2 - wv2, 2);
  const int neps = V.odd_variables() ? 4 : 1;
  for (int j = 0; j < V.space.size(); ++j) {
    const SparseVec w = basis_vec(j);
    const int ww2 = V.space.weight2[j];
    const int S2 = wu2 + wv2 + ww2;
    const int b_hi = floor_div(cap2 - wu2 - ww2, 2);
    const int c_hi = floor_div(cap2 - wv2 - ww2, 2);
    for (int eps = 0; eps < neps; ++eps) {
      const int ne = (eps & 1) + ((eps >> 1) & 1);
      for (int K2 = 0; K2 <= cap2; ++K2) {
        const int num = K2 - S2 - ne;
        if (num % 2 != 0) continue;
        const int s = num / 2 - 1;  // a + b + c
        for (int a = a_lo; a <= a_hi; ++a)
          for (int b = s - a - c_hi; b <= b_hi; ++b) {
            const int c = s - a - b;
            SparseVec res;
            if (!jacobi_residual(J, a, b, c, eps, w, res)) continue;
            ++r.checked;
            if (!res.empty()) {
              std::ostringstream os;
              os << "u=[" << V.space.labels[u] << "] v=[" << V.space.labels[v] << "] w=[" << V.space.labels[j]
                 << "] x0^" << a << " x1^" << b << " x2^" << c << " phi-component " << eps
                 << " residual " << to_string(V.space, res);
              fail(r, os.str());
              return;
            }
          }
      }
    }
  }
}

}  // namespace

AxiomResult jacobi_check(const VertexData& V, int u, int v) {
  AxiomResult r{"jacobi"};
  const int cap = V.odd_variables() ? V.phi_label_cap2 : V.weight_cap2;
  if (u < 0 || v < 0 || u >= V.space.size() || v >= V.space.size() || V.space.weight2[u] > cap ||
      V.space.weight2[v] > cap)
    throw DomainError("jacobi_check needs labels with complete mode tables");
  jacobi_pair(V, u, v, r);
  return r;
}

AxiomResult jacobi_check_all(const VertexData& V, bool parallel) {
  std::vector<std::pair<int, int>> pairs;
  const int label_cap = V.odd_variables() ? V.phi_label_cap2 : V.weight_cap2;
  for (int u = 0; u < V.space.size(); ++u)
    for (int v = 0; v < V.space.size(); ++v)
      if (V.space.weight2[u] <= label_cap && V.space.weight2[v] <= label_cap) pairs.emplace_back(u, v);
  std::vector<AxiomResult> parts(pairs.size());
  const int np = static_cast<int>(pairs.size());
  if (parallel) {
#pragma omp parallel for schedule(dynamic)
    for (int k = 0; k < np; ++k) jacobi_pair(V, pairs[k].first, pairs[k].second, parts[k]);
  } else {
    for (int k = 0; k < np; ++k) jacobi_pair(V, pairs[k].first, pairs[k].second, parts[k]);
  }
  AxiomResult r{"jacobi"};
  for (const auto& p : parts) {
    r.checked += p.checked;
    if (!p.pass) fail(r, p.witness);
  }
  return r;
}

Report consequence_checks(const VertexData& V) {
  Report rep;
  const int N = V.space.size();
  const NSGen gm = NSGen::G2(-1);
  auto key_range = [&](int v, auto&& body) {
    for (int n2 = V.space.weight2[v] - 2 - V.weight_cap2; n2 <= V.space.weight2[v] - 2 + V.weight_cap2; ++n2) body(n2);
  };
  // [G(−½), v_n] = v_{n−½} with odd variables, = (G(−½)v)_n without
  {
    AxiomResult r{V.odd_variables() ? "phi-modes are G(-1/2) brackets" : "G(-1/2) bracket"};
    AxiomResult r3{"G(-1/2) bracket"};
    for (int v = 0; v < N; ++v) {
      const Rational sv = V.space.parity[v] ? -1 : 1;
      SparseVec gv;
      const bool have_gv = add_ns(V, gm, 1, basis_vec(v), gv);
      key_range(v, [&](int n2) {
        if (n2 % 2 != 0) return;
        for (int j = 0; j < N; ++j) {
          const SparseVec w = basis_vec(j);
          SparseVec t1, lhs, t2;
          if (!add_mode(V, v, n2, 1, w, t1) || !add_ns(V, gm, 1, t1, lhs)) continue;
          if (!add_ns(V, gm, 1, w, t2) || !add_mode(V, v, n2, -sv, t2, lhs)) continue;
          if (V.odd_variables() && V.has_mode(v, n2 - 1)) {
            SparseVec rhs;
            if (add_mode(V, v, n2 - 1, 1, w, rhs)) {
              ++r.checked;
              if (lhs != rhs) fail(r, mode_name(V, v, n2 - 1) + " on [" + V.space.labels[j] + "]");
            }
          }
          if (have_gv) {
            SparseVec rhs;
            if (add_mode(V, gv, n2, 1, w, rhs)) {
              ++r3.checked;
              if (lhs != rhs) fail(r3, "(G(-1/2)[" + V.space.labels[v] + "])_" + std::to_string(n2 / 2));
            }
          }
        }
      });
    }
    if (V.odd_variables()) rep.push_back(r);
    rep.push_back(r3);
  }
  // ∂_x Y(v) = Y(L(−1)v)
  {
    AxiomResult r{"L(-1) derivative"};
    for (int v = 0; v < N; ++v) {
      SparseVec lv;
      if (!add_ns(V, NSGen::L(-1), 1, basis_vec(v), lv)) continue;
      key_range(v, [&](int n2) {
        if (!V.has_mode(v, n2)) return;
        const int e = (n2 % 2 != 0) ? 1 : 0;
        const int m = (n2 + e) / 2;
        for (int j = 0; j < N; ++j) {
          const SparseVec w = basis_vec(j);
          SparseVec lhs, rhs;
          if (!add_mode(V, lv, n2 + 2, 1, w, lhs) || !add_mode(V, v, n2, Rational(-m - 1), w, rhs)) continue;
          ++r.checked;
          if (lhs != rhs) fail(r, "(L(-1)[" + V.space.labels[v] + "]) mode " + std::to_string(n2 + 2) + "/2");
        }
      });
    }
    rep.push_back(r);
  }
  // (∂_φ + φ∂_x) Y(v) = Y(G(−½)v)
  if (V.odd_variables()) {
    AxiomResult r{"odd derivative"};
    for (int v = 0; v < N; ++v) {
      SparseVec gv;
      if (!add_ns(V, gm, 1, basis_vec(v), gv)) continue;
      key_range(v, [&](int n2) {
        for (int j = 0; j < N; ++j) {
          const SparseVec w = basis_vec(j);
          SparseVec lhs, rhs;
          if (!add_mode(V, gv, n2, 1, w, lhs)) continue;
          bool ok;
          if (n2 % 2 == 0) {
            ok = add_mode(V, v, n2 - 1, 1, w, rhs);  // (Gv)_n = v_{n−½}
          } else {
            const int m = (n2 + 1) / 2;  // (Gv)_{m−½} = −m v_{m−1}
            ok = add_mode(V, v, n2 - 1, Rational(-m), w, rhs);
          }
          if (!ok) continue;
          ++r.checked;
          if (lhs != rhs) fail(r, "(G(-1/2)[" + V.space.labels[v] + "]) mode " + std::to_string(n2) + "/2");
        }
      });
    }
    rep.push_back(r);
  }
  return rep;
}

AxiomResult ns_modes_check(const VertexData& V, int range) {
  AxiomResult r{"NS relations"};
  std::vector<NSGen> gens;
  for (int t = -2 * range; t <= 2 * range; ++t) gens.push_back(t % 2 == 0 ? NSGen::L(t / 2) : NSGen::G2(t));
  for (const auto& x : gens)
    for (const auto& y : gens) {
      const Rational sign = (x.is_odd() && y.is_odd()) ? 1 : -1;
      const auto rhs_terms = ns_bracket(x, y);
      for (int j = 0; j < V.space.size(); ++j) {
        const SparseVec w = basis_vec(j);
        SparseVec lhs, t1, t2, rhs;
        if (!add_ns(V, y, 1, w, t1) || !add_ns(V, x, 1, t1, lhs)) continue;
        if (!add_ns(V, x, 1, w, t2) || !add_ns(V, y, sign, t2, lhs)) continue;
        bool ok = true;
        for (const auto& [g, k] : rhs_terms) ok = ok && add_ns(V, g, k, w, rhs);
        if (!ok) continue;
        ++r.checked;
        if (lhs != rhs) fail(r, "[" + to_string(x) + ", " + to_string(y) + "] on [" + V.space.labels[j] + "]");
      }
    }
  return r;
}

Report check_vosa(const VertexData& V, bool parallel) {
  Report rep;
  rep.push_back(check_vacuum(V));
  rep.push_back(check_creation(V));
  rep.push_back(jacobi_check_all(V, parallel));
  for (auto& x : consequence_checks(V)) rep.push_back(x);
  rep.push_back(ns_modes_check(V));
  AxiomResult cc{"central charge"};
  try {
    auto [c1, c2] = central_charge(V);
    cc.checked = 2;
    if (c1 != V.c || c2 != V.c)
      fail(cc, "L-relation gives " + to_string(c1) + ", G-relation gives " + to_string(c2) + ", stored " + to_string(V.c));
  } catch (const Error& e) {
    fail(cc, e.what());
  }
  rep.push_back(cc);
  return rep;
}

}  // namespace superns
