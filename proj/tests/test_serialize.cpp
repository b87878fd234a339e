#include <gtest/gtest.h>

#include "superns/errors.hpp"
#include "superns/serialize.hpp"
#include "test_support.hpp"

using namespace superns;
using superns::testing::random_grassmann;
using superns::testing::random_soul;
using superns::testing::uniform;

TEST(Serialize, GrassmannRoundTrip) {
  for (int rep = 0; rep < 50; ++rep) {
    const int L = uniform(0, 6);
    const Grassmann g = random_grassmann(L, -1, 5, uniform(0, 1) == 1, true);
    EXPECT_EQ(grassmann_from_json(Json::parse(to_json(g).dump()), L), g);
  }
}

TEST(Serialize, GrassmannFormat) {
  const int L = 3;
  const Grassmann g = Grassmann::scalar(CRational(frac(1, 2)), L) +
                      Grassmann::monomial(0b101, CRational(Rational(-2), Rational(3)), L);
  const Json j = to_json(g);
  EXPECT_EQ(j.dump(), R"([{"indices":[],"re":"1/2","im":"0"},{"indices":[1,3],"re":"-2","im":"3"}])");
  EXPECT_EQ(grassmann_from_json(Json("7/3"), L), Grassmann::scalar(CRational(frac(7, 3)), L));
}

TEST(Serialize, GrassmannRejectsBadInput) {
  EXPECT_THROW(grassmann_from_json(Json::parse(R"([{"indices":[4],"re":"1"}])"), 3), ParseError);
  EXPECT_THROW(grassmann_from_json(Json::parse(R"([{"indices":[2,1],"re":"1"}])"), 3), ParseError);
  EXPECT_THROW(grassmann_from_json(Json::parse(R"([{"indices":[1],"re":"1/0"}])"), 3), ParseError);
  EXPECT_THROW(grassmann_from_json(Json::parse(R"([{"indices":[1],"re":"x"}])"), 3), ParseError);
  EXPECT_THROW(grassmann_from_json(Json::parse(R"([{"indices":["a"],"re":"1"}])"), 3), ParseError);
}

TEST(Serialize, SuperSeriesRoundTrip) {
  const int L = 4;
  for (int rep = 0; rep < 10; ++rep) {
    CoordData c = CoordData::trivial(L);
    const Rational squares[] = {1, 4, frac(9, 4)};
    c.a0 = Grassmann::scalar(CRational(squares[uniform(0, 2)]), L) + random_soul(L, 0);
    c.A[uniform(1, 3)] = random_soul(L, 0);
    c.M[uniform(1, 3)] = random_soul(L, 1);
    const SuperSeries H = ss_exp_zero(c, Window{-6, 6});
    const SuperSeries back = superseries_from_json(Json::parse(to_json(H).dump()));
    EXPECT_TRUE(known_equal(H, back));
    EXPECT_EQ(to_json(back).dump(), to_json(H).dump());
  }
}

TEST(Serialize, ModuliRoundTrip) {
  const int L = 3;
  ModuliElement q = sk_trivial(3, L);
  q.punctures[0] = {Grassmann::scalar(CRational(5), L) + Grassmann::monomial(0b011, CRational(1), L),
                    Grassmann::generator(3, L)};
  q.local[1].M[2] = Grassmann::generator(1, L);
  q.infinity.B[1] = Grassmann::monomial(0b110, CRational(frac(1, 3)), L);
  q.branch = Branch::minus;
  EXPECT_EQ(moduli_from_json(Json::parse(to_json(q).dump())), q);
}

TEST(Serialize, ModuliValidates) {
  // coincident punctures
  const Json j = Json::parse(R"({"generators": 1, "n": 3, "punctures": [{"z": "1"}, {"z": "1"}]})");
  EXPECT_THROW(moduli_from_json(j), DomainError);
  EXPECT_THROW(moduli_from_json(Json::parse(R"({"n": 1})")), ParseError);
}

TEST(Serialize, PolynomialRoundTrip) {
  const SymbolTablePtr T = sewing_table(2);
  const GradedPoly p = GradedPoly::symbol(T, sewing_symbol('M', 1)) * GradedPoly::symbol(T, sewing_symbol('N', 2)) *
                           CRational(frac(3, 4)) +
                       GradedPoly::alpha_power(T, -3) * GradedPoly::symbol(T, "c");
  EXPECT_EQ(poly_from_json(Json::parse(to_json(p).dump()), T), p);
  EXPECT_EQ(*symbol_table_from_json(Json::parse(to_json(*T).dump())), *T);
}

TEST(Serialize, VertexDataRoundTrip) {
  const VertexData V = fixture_boson_fermion(6);
  const VertexData back = vertex_data_from_json(Json::parse(to_json(V).dump()));
  EXPECT_EQ(back.space, V.space);
  EXPECT_EQ(back.weight_cap2, V.weight_cap2);
  EXPECT_EQ(back.phi_label_cap2, V.phi_label_cap2);
  EXPECT_EQ(back.c, V.c);
  EXPECT_EQ(back.modes, V.modes);
  EXPECT_TRUE(same_vertex_data(back, V, V.phi_label_cap2));
}

TEST(Serialize, VertexDataRejectsBrokenGrading) {
  const VertexData V = fixture_boson_fermion(6);
  Json j = to_json(V);
  j["dims"][1][1] = 7;
  EXPECT_THROW(vertex_data_from_json(j), ParseError);
  j = to_json(V);
  j["tau"] = Json::array({Json::array({0, "1"})});  // the vacuum is not odd of weight 3/2
  EXPECT_THROW(vertex_data_from_json(j), ParseError);
}
