#include <benchmark/benchmark.h>

#include <cmath>
#include <vector>

#include "upasim/operators.hpp"

using namespace upasim;

namespace {

Grid square(int n) { return Grid::make(2, std::vector<double>{1.0, 1.0}, std::vector<int>{n, n}); }

Field wavy(const Grid& g) {
  return sample(g, [](const Point& x) { return 1.0 + 0.3 * std::cos(3.0 * x[0]) * std::sin(2.0 * x[1]); });
}

void BM_DiffusionApply(benchmark::State& state) {
  const Grid g = square(static_cast<int>(state.range(0)));
  const Field u = wavy(g);
  const std::vector<double> d(g.size(), 0.05);
  for (auto _ : state) benchmark::DoNotOptimize(diffusion_apply(u, d));
  state.SetItemsProcessed(state.iterations() * static_cast<long>(g.size()));
}
BENCHMARK(BM_DiffusionApply)->Arg(32)->Arg(64)->Arg(128);

void BM_AssembleDiffusion(benchmark::State& state) {
  const Grid g = square(static_cast<int>(state.range(0)));
  const std::vector<double> d(g.size(), 0.05);
  for (auto _ : state) benchmark::DoNotOptimize(assemble_diffusion_matrix(d, g));
  state.SetItemsProcessed(state.iterations() * static_cast<long>(g.size()));
}
BENCHMARK(BM_AssembleDiffusion)->Arg(32)->Arg(64)->Arg(128);

void BM_TaxisDivergence(benchmark::State& state) {
  const Grid g = square(static_cast<int>(state.range(0)));
  const Field carrier = wavy(g);
  const FaceField drift = face_gradient(wavy(g));
  for (auto _ : state) benchmark::DoNotOptimize(taxis_divergence(carrier, drift));
  state.SetItemsProcessed(state.iterations() * static_cast<long>(g.size()));
}
BENCHMARK(BM_TaxisDivergence)->Arg(32)->Arg(64)->Arg(128);

}  // namespace
