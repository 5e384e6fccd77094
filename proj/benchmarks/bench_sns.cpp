#include <benchmark/benchmark.h>

#include <vector>

#include "weaklink/constants.hpp"
#include "weaklink/sns.hpp"

using namespace weaklink;

namespace {

sns::DiffusiveJunction junction(double d_cm2) {
  sns::DiffusiveJunction j;
  j.length = 30e-9;
  j.diffusion = d_cm2 * units::cm2_per_s;
  j.r_n = 1300.0;
  return j;
}

}  // namespace

// Low T needs the most Matsubara terms.
static void BM_MatsubaraSum(benchmark::State& state) {
  const auto j = junction(1.1);
  const double t = static_cast<double>(state.range(0));
  for (auto _ : state) benchmark::DoNotOptimize(sns::dubos_icrn(j, t));
}
BENCHMARK(BM_MatsubaraSum)->Arg(1)->Arg(3)->Arg(6)->Arg(11);

static void BM_FitDiffusion(benchmark::State& state) {
  std::vector<double> grid;
  for (int k = 0; k < 17; ++k) grid.push_back(3.0 + 0.5 * k);
  const auto data = sns::ic_curve(junction(1.1), grid);
  for (auto _ : state) benchmark::DoNotOptimize(sns::fit_diffusion(data, junction(0.5)));
}
BENCHMARK(BM_FitDiffusion)->Unit(benchmark::kMicrosecond);
