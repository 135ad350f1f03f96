#include <random>

#include <benchmark/benchmark.h>

#include <bellmix/harness.hpp>

namespace {

using namespace bellmix;

ComplexMatrix random_density(std::uint64_t seed) {
  std::mt19937_64 rng(seed);
  std::normal_distribution<double> n(0.0, 1.0);
  ComplexMatrix g(4, 4);
  for (int r = 0; r < 4; ++r)
    for (int c = 0; c < 4; ++c) g(r, c) = Complex(n(rng), n(rng));
  ComplexMatrix m = g * g.adjoint();
  return m / m.trace().real();
}

void BM_HermitianEigen(benchmark::State& state) {
  const ComplexMatrix m = random_density(1);
  for (auto _ : state) benchmark::DoNotOptimize(hermitian_eigen(m));
}
BENCHMARK(BM_HermitianEigen);

void BM_Concurrence(benchmark::State& state) {
  const DensityMatrix rho = DensityMatrix::from_matrix(random_density(2));
  for (auto _ : state) benchmark::DoNotOptimize(concurrence(rho));
}
BENCHMARK(BM_Concurrence);

void BM_Fidelity(benchmark::State& state) {
  const DensityMatrix a = DensityMatrix::from_matrix(random_density(3));
  const DensityMatrix b = DensityMatrix::from_matrix(random_density(4));
  for (auto _ : state) benchmark::DoNotOptimize(fidelity(a, b));
}
BENCHMARK(BM_Fidelity);

void BM_SimulateCounts(benchmark::State& state) {
  const DensityMatrix rho = mix_duty_cycle(0.25);
  AcquisitionConfig acq;
  acq.pairs_per_setting = static_cast<double>(state.range(0));
  for (auto _ : state) {
    benchmark::DoNotOptimize(simulate_counts(rho, standard_projector_set(), acq));
    ++acq.seed;
  }
}
BENCHMARK(BM_SimulateCounts)->Arg(10000)->Arg(1000000);

void BM_MleReconstruct(benchmark::State& state) {
  const double alpha = static_cast<double>(state.range(0)) / 100.0;
  AcquisitionConfig acq;
  acq.seed = 42;
  const CountRecords counts = simulate_counts(mix_duty_cycle(alpha), standard_projector_set(), acq);
  MleOptions opts;
  opts.record_trace = false;
  for (auto _ : state) {
    const auto r = mle_reconstruct(counts, standard_projector_set(), opts);
    state.counters["iterations"] = r.iterations;
  }
}
BENCHMARK(BM_MleReconstruct)->Arg(0)->Arg(25)->Arg(50)->Unit(benchmark::kMicrosecond);

void BM_SweepPoint(benchmark::State& state) {
  SweepSpec spec;
  spec.alphas = {0.25};
  spec.resamples = static_cast<int>(state.range(0));
  for (auto _ : state) benchmark::DoNotOptimize(run_sweep(spec));
}
BENCHMARK(BM_SweepPoint)->Arg(0)->Arg(20)->Unit(benchmark::kMillisecond);

}  // namespace

BENCHMARK_MAIN();
