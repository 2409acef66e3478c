#include <benchmark/benchmark.h>

#include <cmath>
#include <vector>

#include "upasim/functionals.hpp"

using namespace upasim;

namespace {

FieldHistory synthetic_history(int n, int samples) {
  const Grid g = Grid::make(2, std::vector<double>{1.0, 1.0}, std::vector<int>{n, n});
  FieldHistory h(g, {Species::C});
  for (int m = 0; m < samples; ++m) {
    const double t = 0.01 * m;
    const Field f = sample(g, [t](const Point& x) { return std::exp(-t) * std::cos(3.0 * x[0]) * x[1]; });
    h.append(t, std::span<const Field>(&f, 1));
  }
  return h;
}

void BM_Campanato(benchmark::State& state) {
  const FieldHistory h = synthetic_history(static_cast<int>(state.range(0)), 8);
  const double dx = 1.0 / static_cast<double>(state.range(0));
  const std::vector<double> radii{2 * dx, 4 * dx};
  for (auto _ : state) benchmark::DoNotOptimize(campanato_seminorm(h, Species::C, 4.0, radii));
}
BENCHMARK(BM_Campanato)->Arg(16)->Arg(32)->Unit(benchmark::kMillisecond);

void BM_Hoelder(benchmark::State& state) {
  const FieldHistory h = synthetic_history(static_cast<int>(state.range(0)), 4);
  for (auto _ : state) benchmark::DoNotOptimize(holder_seminorm(h, Species::C, 0.5));
}
BENCHMARK(BM_Hoelder)->Arg(8)->Arg(16)->Unit(benchmark::kMillisecond);

void BM_V2Norm(benchmark::State& state) {
  const FieldHistory h = synthetic_history(static_cast<int>(state.range(0)), 20);
  for (auto _ : state) benchmark::DoNotOptimize(v2_norm(h, Species::C));
}
BENCHMARK(BM_V2Norm)->Arg(32)->Arg(64);

}  // namespace
