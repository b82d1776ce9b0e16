#include <benchmark/benchmark.h>

#include <cstdint>
#include <random>
#include <vector>

#include "swarmkit/burst_predictor.h"
#include "swarmkit/rate_model.h"

namespace {

swarmkit::SwarmState make_state(std::size_t n, std::uint64_t seed) {
  std::mt19937_64 rng(seed);
  std::uniform_int_distribution<std::int64_t> piece(0, 999);
  std::uniform_real_distribution<double> cap(16.0, 128.0);
  std::vector<std::int64_t> counts(n);
  std::vector<double> caps(n);
  for (std::size_t i = 0; i < n; ++i) {
    counts[i] = piece(rng);
    caps[i] = cap(rng);
  }
  swarmkit::SwarmState s = swarmkit::SwarmState::homogeneous(counts, 64.0, 64.0);
  s.leecher_capacities = caps;
  return s;
}

void BM_ComputeRates(benchmark::State& state) {
  const auto s = make_state(static_cast<std::size_t>(state.range(0)), 7);
  for (auto _ : state) benchmark::DoNotOptimize(swarmkit::compute_rates(s));
  state.SetComplexityN(state.range(0));
}
BENCHMARK(BM_ComputeRates)->RangeMultiplier(2)->Range(2, 256)->Complexity();

void BM_ProgressiveFillOracle(benchmark::State& state) {
  const auto s = make_state(static_cast<std::size_t>(state.range(0)), 7);
  for (auto _ : state) benchmark::DoNotOptimize(swarmkit::progressive_fill_oracle(s, 0.01));
}
BENCHMARK(BM_ProgressiveFillOracle)->Arg(4)->Arg(8);

void BM_PredictBounds(benchmark::State& state) {
  const swarmkit::BurstScenario sc{1.0 / 1000.0, 48.0, 64.0, 256000.0, 0.99};
  for (auto _ : state) benchmark::DoNotOptimize(swarmkit::predict_bounds(sc));
}
BENCHMARK(BM_PredictBounds);

}  // namespace
