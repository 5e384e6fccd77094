#include <benchmark/benchmark.h>

#include <vector>

#include "weaklink/mwfit.hpp"

using namespace weaklink;

static void BM_CircleFit(benchmark::State& state) {
  mw::NotchResonance r;
  r.f_r = 6e9;
  r.q_internal = 1e6;
  r.q_coupling_abs = 1e6;
  r.phi0 = 0.1;
  r.q_loaded = 0.5e6;
  r.amplitude = 0.8;
  r.phase = 0.7;
  r.delay = 40e-9;
  mw::ComplexTrace t;
  const auto n = static_cast<std::size_t>(state.range(0));
  const double half = 5.0 * r.f_r / r.q_loaded;
  for (std::size_t k = 0; k < n; ++k) {
    t.frequency.push_back(r.f_r - half + 2.0 * half * static_cast<double>(k) / static_cast<double>(n - 1));
    t.s21.push_back(mw::notch_model(r, t.frequency.back()));
  }
  for (auto _ : state) benchmark::DoNotOptimize(mw::circle_fit(t));
}
BENCHMARK(BM_CircleFit)->Arg(201)->Arg(801)->Unit(benchmark::kMicrosecond);

static void BM_SquashJointFit(benchmark::State& state) {
  const mw::SquashParams dev{5.1e9, 15e6, 75e3, 0.0};
  std::vector<double> f;
  for (int k = 0; k < 801; ++k) f.push_back(dev.f_q - 60e6 + 120e6 * k / 800.0);
  std::vector<mw::ComplexTrace> traces;
  for (double r : {0.1, 0.5, 1.0, 2.0}) {
    auto q = dev;
    q.rabi = r * dev.kappa_t;
    traces.push_back(mw::squash_model(q, f, mw::watt_to_dbm(1e-15 * r * r)));
  }
  for (auto _ : state) benchmark::DoNotOptimize(mw::fit_squash(traces));
}
BENCHMARK(BM_SquashJointFit)->Unit(benchmark::kMillisecond);
