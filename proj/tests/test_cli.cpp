#include <gtest/gtest.h>

#include <sys/wait.h>

#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <sstream>

#include "superns/serialize.hpp"

using namespace superns;
namespace fs = std::filesystem;

namespace {

fs::path workdir() {
  static const fs::path d = [] {
    fs::path p = fs::temp_directory_path() / ("superns_cli_test_" + std::to_string(::getpid()));
    fs::create_directories(p);
    return p;
  }();
  return d;
}

std::string file(const std::string& name) { return (workdir() / name).string(); }

void write(const std::string& name, const std::string& text) { std::ofstream(file(name)) << text; }

std::string slurp(const std::string& path) {
  std::ifstream in(path);
  std::stringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

int run(const std::string& args) {
  const std::string cmd = std::string(SUPERNS_CLI) + " " + args + " > " + file("stdout.txt") + " 2>&1";
  const int status = std::system(cmd.c_str());
  return WIFEXITED(status) ? WEXITSTATUS(status) : -1;
}

Grassmann read_value(const Json& j, int L) { return grassmann_from_json(j, L); }

}  // namespace

// ---------------------------------------------------------------- expand

TEST(CliExpand, TrivialInputIsIdentity) {
  write("triv.json", R"({"generators": 2, "zero": {}})");
  ASSERT_EQ(run("expand " + file("triv.json") + " --out " + file("triv_out.json")), 0);
  const SuperSeries H = superseries_from_json(read_json_file(file("triv_out.json"))["series"]);
  EXPECT_TRUE(known_equal(H, ss_identity(2, H.window())));
}

TEST(CliExpand, ScalingInput) {
  write("scale.json", R"({"generators": 1, "zero": {"a0": "9/4"}})");
  ASSERT_EQ(run("expand " + file("scale.json") + " --out " + file("scale_out.json")), 0);
  const SuperSeries H = superseries_from_json(read_json_file(file("scale_out.json"))["series"]);
  // (a₀z, √a₀ θ)
  EXPECT_TRUE(known_equal(H, ss_scaling(Grassmann::scalar(CRational(frac(9, 4)), 1), Branch::plus, H.window())));
  EXPECT_EQ(H.tt.q.coefficient(0), Grassmann::scalar(CRational(frac(3, 2)), 1));
  ASSERT_EQ(run("expand " + file("scale.json") + " --branch - --out " + file("scale_minus.json")), 0);
  const SuperSeries Hm = superseries_from_json(read_json_file(file("scale_minus.json"))["series"]);
  EXPECT_EQ(Hm.tt.q.coefficient(0), Grassmann::scalar(CRational(frac(-3, 2)), 1));
}

TEST(CliExpand, NilpotentInputHasZeroResidual) {
  write("nil.json", R"({"generators": 4, "zero": {"a0": [{"indices": [], "re": "4"}, {"indices": [1, 2], "re": "1"}],
    "A": [[1, [{"indices": [3, 4], "re": "-1/2"}]], [3, [{"indices": [1, 3], "re": "2"}]]],
    "M": [[1, [{"indices": [2], "re": "1"}]], [2, [{"indices": [4], "re": "1/3", "im": "1"}]]]}})");
  ASSERT_EQ(run("expand " + file("nil.json") + " --out " + file("nil_out.json")), 0);
  EXPECT_TRUE(read_json_file(file("nil_out.json"))["residual_zero"].get<bool>());
  write("nilinf.json", R"({"generators": 3, "infinity": {"B": [[2, [{"indices": [1, 2], "re": "1"}]]],
    "N": [[1, [{"indices": [3], "re": "5"}]]]}})");
  EXPECT_EQ(run("expand " + file("nilinf.json")), 0);
}

TEST(CliExpand, ExitCodes) {
  write("bad.json", "{not json");
  EXPECT_EQ(run("expand " + file("bad.json")), 2);
  write("badidx.json", R"({"generators": 1, "zero": {"M": [[1, [{"indices": [2], "re": "1"}]]]}})");
  EXPECT_EQ(run("expand " + file("badidx.json")), 2);
  write("odd_a0.json", R"({"generators": 1, "zero": {"a0": [{"indices": [1], "re": "1"}]}})");
  EXPECT_EQ(run("expand " + file("odd_a0.json")), 2);
  EXPECT_EQ(run("expand " + file("missing.json")), 2);
  EXPECT_EQ(run("expand " + file("triv.json") + " --window nonsense"), 2);
  write("trunc.json", R"({"generators": 2, "zero": {"A": [[5, "1"]]}})");
  EXPECT_EQ(run("expand " + file("trunc.json") + " --window=0,0"), 3);
  EXPECT_EQ(run("frobnicate"), 2);
}

TEST(CliExpand, DeterministicAndFloatOnlyAffectsStdout) {
  ASSERT_EQ(run("expand " + file("nil.json") + " --out " + file("d1.json")), 0);
  const std::string exact_stdout = slurp(file("stdout.txt"));
  ASSERT_EQ(run("expand " + file("nil.json") + " --float --out " + file("d2.json")), 0);
  EXPECT_NE(slurp(file("stdout.txt")), exact_stdout);
  EXPECT_EQ(slurp(file("d1.json")), slurp(file("d2.json")));
}

// ---------------------------------------------------------------- sew

TEST(CliSew, ZeroData) {
  write("z1.json", R"({"generators": 2, "n": 2, "punctures": [{"z": "5"}]})");
  write("z2.json", R"({"n": 1})");
  ASSERT_EQ(run("sew " + file("z1.json") + " " + file("z2.json") + " --index 2 --out " + file("z_out.json")), 0);
  const Json out = read_json_file(file("z_out.json"));
  EXPECT_TRUE(out["series"]["Psi"].empty());
  EXPECT_TRUE(out["series"]["Gamma"].empty());
  EXPECT_TRUE(out["consistency"]["pass"].get<bool>());
}

TEST(CliSew, GammaTwoFromA2B2) {
  // Γ = (j³ − j)/12 α₀⁻ʲ A_j B_j at j = 2 with α₀ = 4
  write("a1.json", R"({"generators": 4, "n": 2, "punctures": [{"z": "5"}],
    "local": [{}, {"a0": "4", "A": [[2, [{"indices": [1, 2], "re": "1"}]]]}]})");
  write("a2.json", R"({"n": 1, "infinity": {"B": [[2, [{"indices": [3, 4], "re": "1"}]]]}})");
  ASSERT_EQ(run("sew " + file("a1.json") + " " + file("a2.json") + " --index 2 --degree 2 --out " + file("a_out.json")), 0);
  const Json out = read_json_file(file("a_out.json"));
  EXPECT_EQ(read_value(out["values"]["Gamma"], 4), Grassmann::monomial(0b1111, CRational(frac(1, 32)), 4));
  EXPECT_TRUE(out["gamma2"]["agrees"].get<bool>());
  EXPECT_TRUE(out["consistency"]["pass"].get<bool>());
}

TEST(CliSew, RandomDataIsConsistent) {
  write("r1.json", R"({"generators": 4, "n": 2, "punctures": [{"z": "5", "theta": [{"indices": [1], "re": "1"}]}],
    "local": [{}, {"a0": "4", "A": [[1, [{"indices": [1, 2], "re": "2"}]], [2, [{"indices": [2, 3], "re": "-1"}]]],
                   "M": [[1, [{"indices": [3], "re": "1"}]]]}]})");
  write("r2.json", R"({"n": 1, "infinity": {"B": [[2, [{"indices": [3, 4], "re": "2"}]]], "N": [[1, [{"indices": [4], "re": "1"}]]]}})");
  EXPECT_EQ(run("sew " + file("r1.json") + " " + file("r2.json") + " --index 2 --degree 3 --weight-cap 2"), 0);
}

TEST(CliSew, NotSewable) {
  write("far.json", R"({"n": 2, "punctures": [{"z": "30"}]})");
  EXPECT_EQ(run("sew " + file("z1.json") + " " + file("far.json") + " --index 2"), 4);
  EXPECT_NE(slurp(file("stdout.txt")).find("cannot sew"), std::string::npos);
  EXPECT_EQ(run("sew " + file("z1.json") + " " + file("z2.json") + " --index 3"), 2);
}

// ---------------------------------------------------------------- check / roundtrip

TEST(CliCheck, FixturePasses) {
  EXPECT_EQ(run("check --weight-cap 3"), 0);
  EXPECT_EQ(run("check --weight-cap 3 --apply-J"), 0);
}

TEST(CliCheck, MutatedFixtureFailsWithWitness) {
  VertexData V = fixture_boson_fermion(6);
  const int a = V.space.find("a-1");
  V.modes[a][0][a][a] += 1;  // α(0) acting nontrivially
  write_json_file(file("mut.json"), to_json(V));
  const std::string witness = file("witness.json");
  EXPECT_EQ(run("check --input " + file("mut.json") + " --out " + witness), 1);
  const Json w = read_json_file(witness);
  EXPECT_FALSE(w["pass"].get<bool>());
  ASSERT_FALSE(w["failures"].empty());
  EXPECT_FALSE(w["failures"][0]["witness"].get<std::string>().empty());
}

TEST(CliCheck, FileInputPasses) {
  write_json_file(file("fix.json"), to_json(fixture_boson_fermion(6)));
  EXPECT_EQ(run("check --input " + file("fix.json")), 0);
}

TEST(CliRoundtrip, FixtureIsIdentical) {
  ASSERT_EQ(run("roundtrip --weight-cap 3 --out " + file("rt.json")), 0);
  const Json out = read_json_file(file("rt.json"));
  EXPECT_TRUE(out["pass"].get<bool>());
  const VertexData E = vertex_data_from_json(out["extracted"]);
  const VertexData V = fixture_boson_fermion(6);
  EXPECT_EQ(E.vacuum, V.vacuum);
  EXPECT_EQ(E.tau, V.tau);
}
