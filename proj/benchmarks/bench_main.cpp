#include <benchmark/benchmark.h>

#include <vector>

#include "lens/caustics.hpp"
#include "lens/imaging.hpp"
#include "lens/lefschetz.hpp"
#include "lens/polycore.hpp"

using namespace lens;

namespace {

UniPoly wilkinson_like(int n) {
  std::vector<cplx> roots;
  for (int k = 1; k <= n; ++k) roots.emplace_back(0.1 * k, 0.05 * (k % 3));
  return UniPoly::from_roots(roots);
}

}  // namespace

static void BM_AberthRoots(benchmark::State& state) {
  const UniPoly p = wilkinson_like(static_cast<int>(state.range(0)));
  for (auto _ : state) benchmark::DoNotOptimize(aberth_roots(p));
}
BENCHMARK(BM_AberthRoots)->Arg(3)->Arg(6)->Arg(12);

static void BM_SolveImages(benchmark::State& state) {
  const auto id = static_cast<ModelId>(state.range(0));
  const CatastropheModel m = draw_model(id, default_box(id), 42, 0);
  state.SetLabel(std::string(to_string(id)));
  for (auto _ : state) benchmark::DoNotOptimize(solve_images(m));
}
BENCHMARK(BM_SolveImages)->DenseRange(0, static_cast<int>(kAllModels.size()) - 1);

static void BM_VerifyBatch(benchmark::State& state) {
  const int trials = static_cast<int>(state.range(0));
  for (auto _ : state)
    benchmark::DoNotOptimize(
        verify_invariant(ModelId::elliptic_umbilic, trials, 42, default_box(ModelId::elliptic_umbilic), 1e-8));
  state.SetItemsProcessed(state.iterations() * trials);
}
BENCHMARK(BM_VerifyBatch)->Arg(100)->Arg(1000)->Unit(benchmark::kMillisecond);

static void BM_LefschetzTotal(benchmark::State& state) {
  const CatastropheModel m = instantiate(ModelId::hyperbolic_umbilic, {.c = 1.0, .y = {0.3, 0.7}});
  for (auto _ : state) benchmark::DoNotOptimize(lefschetz_total(m));
}
BENCHMARK(BM_LefschetzTotal);

static void BM_CriticalCurve(benchmark::State& state) {
  const CatastropheModel m = instantiate(ModelId::elliptic_umbilic, {.c = 3.0});
  for (auto _ : state) {
    const CriticalCurve curve = critical_curve(m, static_cast<int>(state.range(0)));
    benchmark::DoNotOptimize(beta_cusp_detect(m, curve));
  }
}
BENCHMARK(BM_CriticalCurve)->Arg(1000)->Arg(10000);

BENCHMARK_MAIN();
