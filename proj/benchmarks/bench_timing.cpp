#include <benchmark/benchmark.h>

#include <algorithm>
#include <vector>

#include "qsatlink/random.hpp"
#include "qsatlink/timing.hpp"

using namespace qsatlink;

namespace {

TimeTagStream synthetic_stream(std::size_t n_events) {
  Rng rng(1234);
  std::vector<TimeTag> events;
  events.reserve(n_events);
  for (std::size_t i = 0; i < n_events; ++i) {
    events.push_back({rng.uniform() * 40.0, rng.bernoulli(0.5) ? 1 : 0});
  }
  std::sort(events.begin(), events.end(),
            [](const TimeTag& a, const TimeTag& b) { return a.time < b.time; });
  return TimeTagStream::quantized(std::move(events), 81e-12);
}

std::vector<double> synthetic_epochs() {
  std::vector<double> epochs;
  for (int i = 0; i <= 400; ++i) epochs.push_back(0.1 * i + 0.008);
  return epochs;
}

}  // namespace

static void BM_GateEvents(benchmark::State& state) {
  auto stream = synthetic_stream(static_cast<std::size_t>(state.range(0)));
  ArrivalGrid grid(synthetic_epochs(), 10000000);
  GateConfig cfg;
  for (auto _ : state) {
    benchmark::DoNotOptimize(gate_events(stream, grid, cfg));
  }
  state.SetComplexityN(state.range(0));
}
BENCHMARK(BM_GateEvents)->RangeMultiplier(4)->Range(1000, 256000)->Complexity();

static void BM_AnalyzeStream(benchmark::State& state) {
  auto stream = synthetic_stream(10000);
  auto epochs = synthetic_epochs();
  GateConfig cfg;
  for (auto _ : state) {
    benchmark::DoNotOptimize(analyze_stream(stream, epochs, cfg));
  }
}
BENCHMARK(BM_AnalyzeStream);
