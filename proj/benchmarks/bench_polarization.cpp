#include <benchmark/benchmark.h>

#include "qsatlink/polarization.hpp"
#include "qsatlink/random.hpp"

using namespace qsatlink;

static void BM_RoundTrip(benchmark::State& state) {
  Rng rng(7);
  PolarizationState psi = PolarizationState::circular_left();
  for (auto _ : state) {
    TelescopePose pose{rng.uniform() * 6.28, rng.uniform() * 1.5};
    benchmark::DoNotOptimize(round_trip(pose, 0.3927, psi));
  }
}
BENCHMARK(BM_RoundTrip);

static void BM_CoudeUplink(benchmark::State& state) {
  Rng rng(9);
  for (auto _ : state) {
    TelescopePose pose{rng.uniform() * 6.28, rng.uniform() * 1.5};
    benchmark::DoNotOptimize(coude_uplink(pose));
  }
}
BENCHMARK(BM_CoudeUplink);
