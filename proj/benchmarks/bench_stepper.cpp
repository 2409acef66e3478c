#include <benchmark/benchmark.h>

#include <filesystem>
#include <vector>

#include "upasim/io/config.hpp"
#include "upasim/stepper.hpp"

using namespace upasim;

namespace {

// One coupled step of the reference configuration, refined by the argument.
void BM_ReferenceStep(benchmark::State& state) {
  io::RunConfig c = io::load_config(std::filesystem::path(UPASIM_CONFIG_DIR) / "reference_strict.ini");
  const int n = static_cast<int>(state.range(0));
  c.grid.cells = {n, n, 3};
  const StateFields initial(io::make_initial_fields(c), 0.0);
  Stepper stepper(initial.grid(), c.params, c.scheme);
  int sweeps = 0;
  for (auto _ : state) {
    auto [next, report] = stepper.step(initial, c.dt);
    sweeps = report.picard_iterations;
    benchmark::DoNotOptimize(next);
  }
  state.counters["picard_sweeps"] = sweeps;
  state.SetItemsProcessed(state.iterations() * static_cast<long>(initial.grid().size()));
}
BENCHMARK(BM_ReferenceStep)->Arg(32)->Arg(64)->Unit(benchmark::kMillisecond);

}  // namespace
