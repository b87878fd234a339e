// Serial reference against the OpenMP kernels on fixed desk-scale inputs.
#include <benchmark/benchmark.h>

#include "superns/correspond.hpp"
#include "superns/sewing.hpp"
#include "superns/vosa.hpp"

using namespace superns;

namespace {

const int D = 3;

struct VermaCase {
  SymbolTablePtr table = sewing_table(2);
  VermaModule module{table, GradedPoly::symbol(table, "c", D), GradedPoly::symbol(table, "h", D), 8, D};
  SewingInput input = sewing_symbols(table, 2, D);
  SewingSeries series = sw_solve(input, table, D);
  EnvelopingElement left = sw_left_side(input, table, D);
};

const VermaCase& verma_case() {
  static const VermaCase c;
  return c;
}

const VertexData& fixture() {
  static const VertexData V = fixture_boson_fermion(6);
  return V;
}

void BM_VermaAct(benchmark::State& state) {
  const VermaCase& c = verma_case();
  for (auto _ : state)
    benchmark::DoNotOptimize(state.range(0) ? ns_verma_act_parallel(c.left, c.module) : ns_verma_act(c.left, c.module));
}
BENCHMARK(BM_VermaAct)->Arg(0)->Arg(1)->Unit(benchmark::kMillisecond);

void BM_VerifyVerma(benchmark::State& state) {
  const VermaCase& c = verma_case();
  for (auto _ : state) benchmark::DoNotOptimize(sw_verify_verma(c.input, c.series, c.module, state.range(0) != 0));
}
BENCHMARK(BM_VerifyVerma)->Arg(0)->Arg(1)->Unit(benchmark::kMillisecond);

void BM_JacobiAll(benchmark::State& state) {
  const VertexData& V = fixture();
  for (auto _ : state) benchmark::DoNotOptimize(jacobi_check_all(V, state.range(0) != 0));
}
BENCHMARK(BM_JacobiAll)->Arg(0)->Arg(1)->Unit(benchmark::kMillisecond);

void BM_Roundtrip(benchmark::State& state) {
  const VertexData& V = fixture();
  for (auto _ : state) benchmark::DoNotOptimize(roundtrip_check(V, state.range(0) != 0));
}
BENCHMARK(BM_Roundtrip)->Arg(0)->Arg(1)->Unit(benchmark::kMillisecond);

}  // namespace

BENCHMARK_MAIN();
