#include <benchmark/benchmark.h>

#include <complex>
#include <vector>

#include "lzlmg/meanfield.hpp"
#include "lzlmg/quantum.hpp"
#include "lzlmg/spin_operators.hpp"
#include "lzlmg/twa.hpp"

using namespace lzlmg;

namespace {

void BM_ApplyHamiltonian(benchmark::State& state) {
  ModelParams p;
  p.spin = static_cast<int>(state.range(0));
  const InteractionBands bands = interaction_bands(p.spin, p.U);
  std::vector<std::complex<double>> psi(static_cast<std::size_t>(p.dim()), {0.1, 0.2}), out(psi.size());
  for (auto _ : state) {
    apply_hamiltonian(p, bands, 1.5, psi, out);
    benchmark::DoNotOptimize(out.data());
  }
  state.SetComplexityN(p.dim());
}
BENCHMARK(BM_ApplyHamiltonian)->RangeMultiplier(4)->Range(8, 512)->Complexity(benchmark::oN);

void BM_SpectrumAt(benchmark::State& state) {
  ModelParams p;
  p.spin = static_cast<int>(state.range(0));
  for (auto _ : state) benchmark::DoNotOptimize(spectrum_at(p, 0.7));
}
BENCHMARK(BM_SpectrumAt)->Arg(12)->Arg(50)->Arg(100);

void BM_MeanFieldTrajectory(benchmark::State& state) {
  ModelParams p;
  p.lambda = 0.1 * static_cast<double>(state.range(0));
  const BlochState init = BlochState::from_z(0.98, 0.0);
  for (auto _ : state) benchmark::DoNotOptimize(integrate_meanfield(p, init));
}
BENCHMARK(BM_MeanFieldTrajectory)->Arg(3)->Arg(50)->Unit(benchmark::kMillisecond);

void BM_TwaPoint(benchmark::State& state) {
  ModelParams p;
  NoiseModel nm;
  nm.n_traj = 64;
  const std::vector<double> lambdas{0.3};
  for (auto _ : state) benchmark::DoNotOptimize(twa_sweep(p, nm, lambdas));
}
BENCHMARK(BM_TwaPoint)->Unit(benchmark::kMillisecond);

void BM_Propagate(benchmark::State& state) {
  ModelParams p;
  p.spin = static_cast<int>(state.range(0));
  p.lambda = 1.0;
  const QuantumState g = initial_ground_state(p);
  for (auto _ : state) benchmark::DoNotOptimize(propagate(p, g));
}
BENCHMARK(BM_Propagate)->Arg(5)->Arg(24)->Unit(benchmark::kMillisecond);

}  // namespace

BENCHMARK_MAIN();
