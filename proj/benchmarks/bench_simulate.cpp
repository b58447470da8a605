#include <benchmark/benchmark.h>

#include "qsatlink/constants.hpp"
#include "qsatlink/protocol.hpp"

using namespace qsatlink;

namespace {

SessionConfig larets_session(double duration_s) {
  SessionConfig cfg{
      SatelliteSpec{"Larets", 691e3, 5.6e5, 1.0, 1.27e-3, true},
      circular_pass(691e3, constants::deg_to_rad(32.0), 0.1, duration_s),
      LinkBudgetParams{}};
  cfg.link.mu_tx = mu_tx_from_power(0.11, 1e8, 532e-9);
  cfg.link.eta_tx = 0.1;
  cfg.link.gain_t = 1.1e9;
  cfg.link.t_zenith = 0.87;
  cfg.link.telescope_area = 1.73;
  cfg.link.eta_rx = 0.13;
  cfg.link.eta_det = 0.1;
  cfg.mu_sat = 3.4;
  cfg.transmissivity_override = 4.3e-7;
  cfg.background_rate_hz = 10.0;
  cfg.state_schedule = {{duration_s, PolarizationState::horizontal(), "H"}};
  return cfg;
}

}  // namespace

static void BM_SimulatePass(benchmark::State& state) {
  auto cfg = larets_session(static_cast<double>(state.range(0)));
  std::uint64_t seed = 1;
  for (auto _ : state) {
    cfg.rng_seed = seed++;
    benchmark::DoNotOptimize(simulate_pass(cfg));
  }
  state.SetComplexityN(state.range(0));
}
BENCHMARK(BM_SimulatePass)->Arg(10)->Arg(40)->Arg(160)->Complexity();

static void BM_TwoWaySession(benchmark::State& state) {
  auto session = larets_session(100.0);
  TwoWaySessionConfig tw;
  for (auto _ : state) {
    benchmark::DoNotOptimize(two_way_session(tw, session));
  }
}
BENCHMARK(BM_TwoWaySession);

BENCHMARK_MAIN();
