#include <benchmark/benchmark.h>

#include "nlsvc/operator.hpp"
#include "nlsvc/propagators.hpp"
#include "nlsvc/spectral.hpp"
#include "nlsvc/transforms.hpp"

using namespace nlsvc;

namespace {

CoefficientSet admissible(const Grid& g) {
  return CoefficientSet::from_profiles(g, Profile::gaussian(1.0, 0.5), Profile::constant(0.0), Profile::gaussian(0.0, 1.0),
                                       0.5, 0.3, 7.0, "admissible");
}

GridFunction packet(const Grid& g) {
  return GridFunction::sample(g, [](double x) { return std::exp(-0.5 * x * x) * std::polar(1.0, 0.5 * x); });
}

Grid grid_for(const benchmark::State& state) { return Grid(40.0, static_cast<std::size_t>(state.range(0))); }

void BM_SpectralDerivative(benchmark::State& state) {
  const Grid g = grid_for(state);
  const GridFunction u = packet(g);
  for (auto _ : state) benchmark::DoNotOptimize(derivative(u));
  state.SetComplexityN(state.range(0));
}
BENCHMARK(BM_SpectralDerivative)->RangeMultiplier(4)->Range(256, 16384)->Complexity(benchmark::oNLogN);

void BM_OperatorApply(benchmark::State& state) {
  const Grid g = grid_for(state);
  const OperatorMatrix A = assemble(admissible(g), g);
  const GridFunction u = packet(g);
  for (auto _ : state) benchmark::DoNotOptimize(A.apply(u));
}
BENCHMARK(BM_OperatorApply)->RangeMultiplier(4)->Range(256, 16384);

void BM_LiouvilleForward(benchmark::State& state) {
  const Grid g = grid_for(state);
  const LiouvilleMap map = build_liouville(admissible(g), g);
  const GridFunction u = packet(g);
  for (auto _ : state) benchmark::DoNotOptimize(apply_liouville(u, map, LiouvilleDirection::forward));
}
BENCHMARK(BM_LiouvilleForward)->RangeMultiplier(4)->Range(256, 4096);

void evolve_steps(benchmark::State& state, Scheme scheme) {
  const Grid g = grid_for(state);
  const CoefficientSet cs = admissible(g);
  StepperConfig cfg;
  cfg.dt = 1e-3;
  cfg.record_stride = 10;
  cfg.scheme = scheme;
  const GridFunction u0 = packet(g);
  for (auto _ : state) benchmark::DoNotOptimize(nlse_evolve(cs, u0, 0.01, cfg));
  state.SetItemsProcessed(state.iterations() * 10);
}

void BM_NonlinearCrankNicolson(benchmark::State& state) { evolve_steps(state, Scheme::crank_nicolson); }
BENCHMARK(BM_NonlinearCrankNicolson)->Arg(1024)->Arg(4096)->Unit(benchmark::kMillisecond);

void BM_NonlinearStrangGauge(benchmark::State& state) { evolve_steps(state, Scheme::strang_gauge); }
BENCHMARK(BM_NonlinearStrangGauge)->Arg(1024)->Arg(4096)->Unit(benchmark::kMillisecond);

}  // namespace

BENCHMARK_MAIN();
