#include <benchmark/benchmark.h>

#include "weaklink/constants.hpp"
#include "weaklink/cpr.hpp"

using namespace weaklink;

static void BM_ResonantLevelCurrent(benchmark::State& state) {
  const double delta = 2.03 * units::meV;
  const cpr::CprModel m = cpr::ResonantLevel{0.14 * delta, delta, 19.5e3};
  double phi = 0.1;
  for (auto _ : state) {
    benchmark::DoNotOptimize(cpr::cpr_current(m, phi));
    phi = phi < 3.0 ? phi + 0.01 : 0.1;
  }
}
BENCHMARK(BM_ResonantLevelCurrent);

static void BM_CriticalCurrent(benchmark::State& state) {
  const double delta = 2.03 * units::meV;
  const cpr::CprModel m = cpr::ResonantLevel{0.14 * delta, delta, 19.5e3};
  for (auto _ : state) benchmark::DoNotOptimize(cpr::critical_current(m));
}
BENCHMARK(BM_CriticalCurrent);

static void BM_Harmonics(benchmark::State& state) {
  const cpr::CprModel m = cpr::SingleChannel{0.9, 2.03 * units::meV, 1.0};
  const int k = static_cast<int>(state.range(0));
  for (auto _ : state) benchmark::DoNotOptimize(cpr::harmonics(m, k));
}
BENCHMARK(BM_Harmonics)->Arg(4)->Arg(12)->Arg(24);

static void BM_EthInversion(benchmark::State& state) {
  const double delta = 2.03 * units::meV;
  for (auto _ : state) benchmark::DoNotOptimize(cpr::eth_from_icrn(0.3, delta));
}
BENCHMARK(BM_EthInversion);
