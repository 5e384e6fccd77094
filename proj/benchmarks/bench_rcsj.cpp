#include <benchmark/benchmark.h>

#include <vector>

#include "weaklink/rcsj.hpp"

using namespace weaklink;

namespace {

rcsj::RcsjConfig sine_junction() {
  rcsj::RcsjConfig c;
  c.cpr = cpr::Sinusoidal{1e-6};
  c.resistance = 14.06;
  c.f_rf = 6.8e9;
  return c;
}

}  // namespace

// One bias point: transient plus the averaging window.
static void BM_SimulatePoint(benchmark::State& state) {
  const auto c = sine_junction();
  const double drive = static_cast<double>(state.range(0)) * 1e-7;
  for (auto _ : state) benchmark::DoNotOptimize(rcsj::simulate_point(c, 1.5e-6, drive));
}
BENCHMARK(BM_SimulatePoint)->Arg(0)->Arg(10)->Arg(20)->Unit(benchmark::kMillisecond);

static void BM_ShapiroMapRow(benchmark::State& state) {
  const auto c = sine_junction();
  std::vector<double> i_dc(static_cast<std::size_t>(state.range(0)));
  for (std::size_t k = 0; k < i_dc.size(); ++k) i_dc[k] = 4e-6 * static_cast<double>(k) / static_cast<double>(i_dc.size());
  const std::vector<double> drive = {1e-6};
  for (auto _ : state) benchmark::DoNotOptimize(rcsj::shapiro_map(c, i_dc, drive, 1));
  state.SetItemsProcessed(state.iterations() * state.range(0));
}
BENCHMARK(BM_ShapiroMapRow)->Arg(16)->Arg(64)->Unit(benchmark::kMillisecond);
