#include <benchmark/benchmark.h>

#include "weaklink/constants.hpp"
#include "weaklink/cpr.hpp"
#include "weaklink/transmon.hpp"

using namespace weaklink;

static void BM_DiagonalizeCutoff(benchmark::State& state) {
  const auto p = transmon::sinusoidal_transmon(units::energy_of_frequency(293e6),
                                               units::energy_of_frequency(26.15e9));
  const int n_cut = static_cast<int>(state.range(0));
  for (auto _ : state) benchmark::DoNotOptimize(transmon::diagonalize_at_cutoff(p, n_cut));
}
BENCHMARK(BM_DiagonalizeCutoff)->RangeMultiplier(2)->Range(16, 128);

// Default cutoff plus the doubling check.
static void BM_Diagonalize(benchmark::State& state) {
  const auto p = transmon::sinusoidal_transmon(units::energy_of_frequency(293e6),
                                               units::energy_of_frequency(26.15e9));
  for (auto _ : state) benchmark::DoNotOptimize(transmon::diagonalize(p));
}
BENCHMARK(BM_Diagonalize);

static void BM_ExtractEj(benchmark::State& state) {
  const double ec = units::energy_of_frequency(293e6);
  for (auto _ : state) {
    benchmark::DoNotOptimize(transmon::extract_ej(7.945e9, ec, transmon::EjMethod::Numerical));
  }
}
BENCHMARK(BM_ExtractEj)->Unit(benchmark::kMillisecond);
