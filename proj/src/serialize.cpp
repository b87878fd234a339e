#include "superns/serialize.hpp"

#include <fstream>
#include <sstream>

#include "superns/errors.hpp"

namespace superns {

namespace {

template <class F>
auto guarded(const char* what, F&& f) -> decltype(f()) {
  try {
    return f();
  } catch (const Json::exception& e) {
    throw ParseError(std::string(what) + ": " + e.what());
  }
}

void expect(bool ok, const std::string& msg) {
  if (!ok) throw ParseError(msg);
}

Rational rat(const Json& j) {
  if (j.is_number_integer()) return Rational(j.get<long>());
  expect(j.is_string(), "expected a rational string");
  return parse_rational(j.get<std::string>());
}

std::string half(int twice) { return to_string(Rational(frac(twice, 2))); }

int doubled(const Json& j) {
  const Rational q = rat(j) * 2;
  expect(q.get_den() == 1, "expected an integer or half-integer");
  return static_cast<int>(q.get_num().get_si());
}

Json family_to_json(const std::map<int, Grassmann>& m) {
  Json out = Json::array();
  for (const auto& [k, g] : m) out.push_back(Json::array({k, to_json(g)}));
  return out;
}

std::map<int, Grassmann> family_from_json(const Json& j, int L) {
  std::map<int, Grassmann> out;
  if (j.is_null()) return out;
  expect(j.is_array(), "expected a list of [j, value] pairs");
  for (const auto& e : j) {
    expect(e.is_array() && e.size() == 2, "expected a [j, value] pair");
    const int k = e[0].get<int>();
    expect(!out.count(k), "repeated index " + std::to_string(k));
    out.emplace(k, grassmann_from_json(e[1], L));
  }
  return out;
}

const char* side_name(Side s) {
  switch (s) {
    case Side::zero: return "zero";
    case Side::infinity: return "infinity";
    default: return "exact";
  }
}

Json sparse_to_json(const SparseVec& v) {
  Json out = Json::array();
  for (const auto& [i, x] : v) out.push_back(Json::array({i, to_string(x)}));
  return out;
}

SparseVec sparse_from_json(const Json& j, int dim) {
  SparseVec out;
  expect(j.is_array(), "expected a sparse vector");
  for (const auto& e : j) {
    expect(e.is_array() && e.size() == 2, "expected an [index, value] pair");
    const int i = e[0].get<int>();
    expect(i >= 0 && i < dim, "vector index out of range");
    const Rational x = rat(e[1]);
    if (sgn(x) != 0) out[i] += x;
  }
  return out;
}

}  // namespace

// ---------------------------------------------------------------- Grassmann and series

Json to_json(const Grassmann& g) {
  Json out = Json::array();
  for (const auto& [m, c] : g.terms()) {
    Json idx = Json::array();
    for (int i = 0; i < 64; ++i)
      if (m >> i & 1) idx.push_back(i + 1);
    out.push_back({{"indices", idx}, {"re", to_string(c.re)}, {"im", to_string(c.im)}});
  }
  return out;
}

Grassmann grassmann_from_json(const Json& j, int L) {
  return guarded("Grassmann element", [&] {
    Grassmann g(L);
    if (!j.is_array()) return Grassmann::scalar(CRational(rat(j)), L);  // plain number for bodies
    for (const auto& t : j) {
      expect(t.is_object(), "Grassmann term must be an object");
      Mask m = 0;
      int prev = 0;
      for (const auto& ij : t.value("indices", Json::array())) {
        const int i = ij.get<int>();
        expect(i > prev, "Grassmann indices must increase");
        expect(i <= L, "generator index " + std::to_string(i) + " exceeds L = " + std::to_string(L));
        m |= Mask(1) << (i - 1);
        prev = i;
      }
      const CRational c{rat(t.value("re", Json("0"))), rat(t.value("im", Json("0")))};
      g.add_term(m, c);
    }
    return g;
  });
}

Json to_json(const Laurent& a) {
  Json out{{"side", side_name(a.side())}};
  if (!a.is_exact()) out["prec"] = a.prec();
  out["terms"] = family_to_json(a.terms());
  return out;
}

Laurent laurent_from_json(const Json& j, int L, Window w) {
  return guarded("Laurent series", [&] {
    Laurent a(L, w);
    const std::string side = j.value("side", std::string("exact"));
    if (side == "zero")
      a.truncate(Side::zero, j.at("prec").get<int>());
    else if (side == "infinity")
      a.truncate(Side::infinity, j.at("prec").get<int>());
    else
      expect(side == "exact", "unknown series side '" + side + "'");
    for (const auto& [n, g] : family_from_json(j.value("terms", Json::array()), L)) {
      expect(a.known(n), "coefficient " + std::to_string(n) + " lies in the unknown region");
      a.set(n, g);
    }
    return a;
  });
}

Json to_json(const SuperSeries& H) {
  return {{"generators", H.generators()},
          {"window", Json::array({H.window().lo, H.window().hi})},
          {"even", {{"f", to_json(H.zt.p)}, {"xi", to_json(H.zt.q)}}},
          {"odd", {{"psi", to_json(H.tt.p)}, {"g", to_json(H.tt.q)}}}};
}

SuperSeries superseries_from_json(const Json& j) {
  return guarded("super series", [&] {
    const int L = j.at("generators").get<int>();
    const Window w{j.at("window").at(0).get<int>(), j.at("window").at(1).get<int>()};
    expect(w.lo <= 0 && w.hi >= 0, "window must contain 0");
    SuperSeries H;
    H.zt = SuperFn(laurent_from_json(j.at("even").at("f"), L, w), laurent_from_json(j.at("even").at("xi"), L, w));
    H.tt = SuperFn(laurent_from_json(j.at("odd").at("psi"), L, w), laurent_from_json(j.at("odd").at("g"), L, w));
    return H;
  });
}

// ---------------------------------------------------------------- coordinates and moduli

Json to_json(const CoordData& c) {
  return {{"a0", to_json(c.a0)}, {"A", family_to_json(c.A)}, {"M", family_to_json(c.M)},
          {"branch", to_string(c.branch)}};
}

CoordData coord_from_json(const Json& j, int L) {
  return guarded("local coordinate", [&] {
    expect(j.is_object(), "local coordinate must be an object");
    CoordData c = CoordData::trivial(L);
    if (j.contains("a0")) c.a0 = grassmann_from_json(j["a0"], L);
    c.A = family_from_json(j.value("A", Json()), L);
    c.M = family_from_json(j.value("M", Json()), L);
    c.branch = parse_branch(j.value("branch", std::string("+")));
    return c;
  });
}

Json to_json(const InfCoordData& c) {
  return {{"B", family_to_json(c.B)}, {"N", family_to_json(c.N)}, {"sk0", c.sk0_constraint}};
}

InfCoordData inf_coord_from_json(const Json& j, int L) {
  return guarded("coordinate at infinity", [&] {
    expect(j.is_object(), "coordinate at infinity must be an object");
    InfCoordData c;
    c.B = family_from_json(j.value("B", Json()), L);
    c.N = family_from_json(j.value("N", Json()), L);
    c.sk0_constraint = j.value("sk0", false);
    return c;
  });
}

Json to_json(const ModuliElement& q) {
  Json punct = Json::array(), local = Json::array();
  for (const auto& [z, t] : q.punctures) punct.push_back({{"z", to_json(z)}, {"theta", to_json(t)}});
  for (const auto& c : q.local) local.push_back(to_json(c));
  return {{"generators", q.generators()}, {"n", q.n},          {"branch", to_string(q.branch)},
          {"punctures", punct},          {"infinity", to_json(q.infinity)}, {"local", local}};
}

ModuliElement moduli_from_json(const Json& j) {
  return guarded("moduli element", [&] {
    expect(j.is_object(), "moduli element must be an object");
    const int L = j.at("generators").get<int>();
    ModuliElement q;
    q.n = j.at("n").get<int>();
    expect(q.n >= 0, "n must be nonnegative");
    q.branch = parse_branch(j.value("branch", std::string("+")));
    for (const auto& p : j.value("punctures", Json::array()))
      q.punctures.push_back({grassmann_from_json(p.at("z"), L), grassmann_from_json(p.value("theta", Json::array()), L)});
    q.infinity = inf_coord_from_json(j.value("infinity", Json::object()), L);
    q.infinity.sk0_constraint = q.n == 0;
    const Json local = j.value("local", Json::array());
    for (const auto& c : local) q.local.push_back(coord_from_json(c, L));
    if (local.empty())
      for (int i = 0; i < q.n; ++i) q.local.push_back(CoordData::trivial(L));
    q.validate();
    return q;
  });
}

// ---------------------------------------------------------------- polynomials and sewing

Json to_json(const SymbolTable& t) {
  Json out = Json::array();
  for (const auto& s : t.symbols()) out.push_back({{"name", s.name}, {"odd", s.odd}, {"weight", s.weight}});
  return out;
}

SymbolTablePtr symbol_table_from_json(const Json& j) {
  return guarded("symbol table", [&] {
    std::vector<Symbol> s;
    for (const auto& e : j) s.push_back({e.at("name").get<std::string>(), e.value("odd", false), e.value("weight", 1)});
    expect(static_cast<int>(s.size()) <= kMaxSymbols, "too many symbols");
    return std::make_shared<const SymbolTable>(std::move(s));
  });
}

Json to_json(const GradedPoly& p) {
  Json out = Json::array();
  const SymbolTable& T = *p.table();
  for (const auto& [m, c] : p.terms()) {
    Json syms = Json::array();
    for (int i = 0; i < T.size(); ++i)
      if (m.exp[i]) syms.push_back(Json::array({T[i].name, m.exp[i]}));
    out.push_back({{"symbols", syms}, {"alpha2", m.alpha2}, {"re", to_string(c.re)}, {"im", to_string(c.im)}});
  }
  return out;
}

GradedPoly poly_from_json(const Json& j, const SymbolTablePtr& table, int cap) {
  return guarded("polynomial", [&] {
    GradedPoly p(table, cap);
    for (const auto& t : j) {
      Monomial m;
      for (const auto& s : t.value("symbols", Json::array())) {
        const int k = table->find(s.at(0).get<std::string>());
        expect(k >= 0, "unknown symbol " + s.at(0).dump());
        const int e = s.at(1).get<int>();
        expect(e > 0 && e < 256 && !((*table)[k].odd && e > 1), "bad exponent for " + (*table)[k].name);
        m.exp[k] = static_cast<std::uint8_t>(e);
        if ((*table)[k].odd) m.odd |= Mask(1) << k;
      }
      m.alpha2 = t.value("alpha2", 0);
      p.add_term(m, CRational{rat(t.value("re", Json("0"))), rat(t.value("im", Json("0")))});
    }
    return p;
  });
}

Json to_json(const SewingSeries& s, const SymbolTable& table) {
  Json psi = Json::array();
  for (const auto& [g, p] : s.Psi) psi.push_back(Json::array({to_string(g), to_json(p)}));
  return {{"symbols", to_json(table)}, {"degree_cap", s.degree_cap}, {"Psi", psi}, {"Gamma", to_json(s.Gamma)}};
}

// ---------------------------------------------------------------- vertex data and reports

Json to_json(const VertexData& V) {
  const GradedSpace& S = V.space;
  Json weights = Json::array(), dims = Json::array();
  for (int w : S.weight2) weights.push_back(half(w));
  for (int w2 = 0; w2 <= V.weight_cap2; ++w2)
    if (S.dim(w2)) dims.push_back(Json::array({half(w2), S.dim(w2)}));
  Json modes = Json::array();
  for (int v = 0; v < S.size(); ++v)
    for (const auto& [n2, mat] : V.modes[v]) {
      Json m = Json::array();
      for (const auto& [col, vec] : mat)
        for (const auto& [row, x] : vec) m.push_back(Json::array({col, row, to_string(x)}));
      modes.push_back({{"label", v}, {"n", half(n2)}, {"matrix", m}});
    }
  return {{"labels", S.labels},
          {"weights", weights},
          {"parities", S.parity},
          {"dims", dims},
          {"weight_cap", half(V.weight_cap2)},
          {"phi_label_cap", V.odd_variables() ? Json(half(V.phi_label_cap2)) : Json(nullptr)},
          {"vacuum", sparse_to_json(V.vacuum)},
          {"tau", sparse_to_json(V.tau)},
          {"c", to_string(V.c)},
          {"modes", modes}};
}

VertexData vertex_data_from_json(const Json& j) {
  return guarded("vertex data", [&] {
    expect(j.is_object(), "vertex data must be an object");
    VertexData V;
    V.space.labels = j.at("labels").get<std::vector<std::string>>();
    for (const auto& w : j.at("weights")) V.space.weight2.push_back(doubled(w));
    V.space.parity = j.at("parities").get<std::vector<int>>();
    const int dim = V.space.size();
    expect(static_cast<int>(V.space.weight2.size()) == dim && static_cast<int>(V.space.parity.size()) == dim,
           "labels, weights and parities differ in length");
    V.weight_cap2 = doubled(j.at("weight_cap"));
    V.phi_label_cap2 = j.at("phi_label_cap").is_null() ? -1 : doubled(j.at("phi_label_cap"));
    for (const auto& d : j.value("dims", Json::array()))
      expect(V.space.dim(doubled(d.at(0))) == d.at(1).get<int>(), "dims disagree with the basis at weight " + d.at(0).dump());
    V.vacuum = sparse_from_json(j.at("vacuum"), dim);
    V.tau = sparse_from_json(j.at("tau"), dim);
    V.c = rat(j.at("c"));
    V.modes.assign(dim, {});
    for (const auto& m : j.at("modes")) {
      const int v = m.at("label").get<int>();
      expect(v >= 0 && v < dim, "mode label out of range");
      SparseMat& mat = V.modes[v][doubled(m.at("n"))];
      for (const auto& e : m.at("matrix")) {
        const int col = e.at(0).get<int>(), row = e.at(1).get<int>();
        expect(col >= 0 && col < dim && row >= 0 && row < dim, "matrix index out of range");
        const Rational x = rat(e.at(2));
        if (sgn(x) != 0) mat[col][row] = x;
      }
    }
    // canonical storage: no empty columns or matrices
    for (auto& table : V.modes)
      for (auto it = table.begin(); it != table.end();) {
        for (auto c = it->second.begin(); c != it->second.end();) c = c->second.empty() ? it->second.erase(c) : std::next(c);
        it = it->second.empty() ? table.erase(it) : std::next(it);
      }
    try {
      V.validate();
    } catch (const Error& e) {
      throw ParseError(e.what());
    }
    return V;
  });
}

Json to_json(const AxiomResult& r) {
  Json out{{"axiom", r.axiom}, {"pass", r.pass}, {"checked", r.checked}};
  if (!r.pass) out["witness"] = r.witness;
  return out;
}

Json to_json(const Report& r) {
  Json out = Json::array();
  for (const auto& a : r) out.push_back(to_json(a));
  return out;
}

Json read_json_file(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw ParseError("cannot open " + path);
  try {
    return Json::parse(in);
  } catch (const Json::exception& e) {
    throw ParseError(path + ": " + e.what());
  }
}

void write_json_file(const std::string& path, const Json& j) {
  std::ofstream out(path);
  if (!out) throw std::runtime_error("cannot write " + path);
  out << j.dump(2) << "\n";
}

}  // namespace superns
