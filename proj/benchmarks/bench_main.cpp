#include <benchmark/benchmark.h>

#include <cmath>
#include <random>
#include <vector>

#include "qprobe/operators.hpp"
#include "qprobe/oracle.hpp"
#include "qprobe/probe.hpp"
#include "qprobe/reconstruct.hpp"
#include "qprobe/sampling.hpp"
#include "qprobe/spectrum.hpp"
#include "qprobe/thermo.hpp"

namespace {

using namespace qprobe;

ComplexMatrix random_hermitian(std::size_t d, std::uint64_t seed) {
  std::mt19937_64 rng(seed);
  std::normal_distribution<double> nd;
  ComplexMatrix h(d, d);
  for (std::size_t i = 0; i < d; ++i) {
    h(i, i) = nd(rng);
    for (std::size_t j = i + 1; j < d; ++j) {
      h(i, j) = Complex(nd(rng), nd(rng)) / std::sqrt(2.0);
      h(j, i) = std::conj(h(i, j));
    }
  }
  return h;
}

Spectrum five_lines() {
  Spectrum s;
  const double p[] = {0.1, 0.3, 0.2, 0.25, 0.15};
  for (int i = 0; i < 5; ++i) s.lines.push_back({0.2 * i, p[i], 1});
  return s;
}

ProbeConfig squeezed_probe(double s) {
  ProbeConfig probe;
  probe.coupling = 1.0;
  probe.interaction_time = 40.0;
  probe.mode = SqueezedMode{s};
  return probe;
}

void BM_Jacobi(benchmark::State& state) {
  const auto d = static_cast<std::size_t>(state.range(0));
  const auto h = random_hermitian(d, 7);
  for (auto _ : state) benchmark::DoNotOptimize(jacobi_eigensolver(h));
  state.SetComplexityN(state.range(0));
}
BENCHMARK(BM_Jacobi)->RangeMultiplier(2)->Range(4, 128)->Complexity();

void BM_ThermalState(benchmark::State& state) {
  const HermitianOperator h(random_hermitian(static_cast<std::size_t>(state.range(0)), 11));
  for (auto _ : state) benchmark::DoNotOptimize(thermal_state(h, 0.7));
}
BENCHMARK(BM_ThermalState)->Arg(8)->Arg(32);

void BM_Sample(benchmark::State& state) {
  const auto dist = distribution_squeezed(five_lines(), squeezed_probe(1.0));
  SamplingOptions options;
  options.workers = static_cast<unsigned>(state.range(1));
  const auto n = static_cast<std::size_t>(state.range(0));
  for (auto _ : state) benchmark::DoNotOptimize(sample_measurements(dist, n, 42, options));
  state.SetItemsProcessed(state.iterations() * state.range(0));
}
BENCHMARK(BM_Sample)->Args({100000, 1})->Args({1000000, 1})->Args({1000000, 4})->UseRealTime()->Unit(benchmark::kMillisecond);

void BM_Reconstruct(benchmark::State& state) {
  const auto probe = squeezed_probe(1.0);
  const auto record = sample_measurements(distribution_squeezed(five_lines(), probe), 1000000, 3);
  const double width = momentum_peak_stddev(probe) / 4.0;
  for (auto _ : state) benchmark::DoNotOptimize(detect_peaks(histogram(record, width), probe, {}));
}
BENCHMARK(BM_Reconstruct)->Unit(benchmark::kMillisecond);

void BM_LogPartition(benchmark::State& state) {
  const auto spec = five_lines();
  for (auto _ : state) benchmark::DoNotOptimize(log_partition_function(spec, 1.3));
}
BENCHMARK(BM_LogPartition);

void BM_Oracle(benchmark::State& state) {
  const auto d = static_cast<std::size_t>(state.range(0));
  const HermitianOperator h(random_hermitian(d, 5));
  const auto rho = SystemState::maximally_mixed(d);
  ProbeConfig probe;
  probe.mode = SqueezedMode{2.0};
  std::vector<double> grid;
  for (int i = -20; i <= 20; ++i) grid.push_back(0.25 * i);
  for (auto _ : state) benchmark::DoNotOptimize(distribution_numeric_oracle(rho, h, probe, grid));
}
BENCHMARK(BM_Oracle)->Arg(2)->Arg(4)->Unit(benchmark::kMillisecond);

}  // namespace
BENCHMARK_MAIN();
