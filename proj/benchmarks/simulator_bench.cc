#include <benchmark/benchmark.h>

#include "swarmkit/simulator.h"

namespace {

void BM_ExplicitArrivals(benchmark::State& state) {
  swarmkit::ScenarioConfig c;
  c.arrivals = swarmkit::ExplicitArrivals{{0, 240, 480, 720, 1320}};
  for (auto _ : state) benchmark::DoNotOptimize(swarmkit::run_simulation(c));
}
BENCHMARK(BM_ExplicitArrivals)->Unit(benchmark::kMillisecond);

// Simulated seconds of a Poisson swarm; throughput is reported in events/s.
void BM_PoissonSwarm(benchmark::State& state) {
  swarmkit::ScenarioConfig c;
  const double horizon = static_cast<double>(state.range(0));
  c.arrivals = swarmkit::PoissonArrivals{1.0 / 1000.0, horizon};
  c.sim_end = horizon;
  c.rng_seed = 11;
  std::size_t events = 0;
  for (auto _ : state) {
    const auto r = swarmkit::run_simulation(c);
    events += r.trace.size();
    benchmark::DoNotOptimize(r);
  }
  state.SetItemsProcessed(static_cast<std::int64_t>(events));
}
BENCHMARK(BM_PoissonSwarm)->Arg(20000)->Arg(100000)->Unit(benchmark::kMillisecond);

}  // namespace
