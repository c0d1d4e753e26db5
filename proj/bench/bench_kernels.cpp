// Serial reference vs OpenMP kernels on the HR grid (400 x 200).
// Run with OMP_NUM_THREADS / PLUMESR_THREADS to vary the parallel width.

#include <benchmark/benchmark.h>

#include <cmath>
#include <vector>

#include "plumesr/kernels.hpp"
#include "plumesr/rng.hpp"

namespace {

using namespace plumesr::kernels;

constexpr GridShape kHr{400, 200, 0.25};
constexpr TransportCoeffs kCoeffs{0.5, 0.05, 0.2};

std::vector<double> random_field(std::uint64_t seed) {
  plumesr::Rng64 rng(seed);
  std::vector<double> v(static_cast<std::size_t>(kHr.width) * kHr.height);
  for (double& x : v) x = rng.next_f64();
  return v;
}

void BM_TransportRhsSerial(benchmark::State& state) {
  const auto c = random_field(1);
  std::vector<double> out(c.size());
  for (auto _ : state) {
    serial::transport_rhs(c, kHr, kCoeffs, out);
    benchmark::DoNotOptimize(out.data());
  }
  state.SetItemsProcessed(state.iterations() * static_cast<std::int64_t>(c.size()));
}
BENCHMARK(BM_TransportRhsSerial);

void BM_TransportRhsOmp(benchmark::State& state) {
  const auto c = random_field(1);
  std::vector<double> out(c.size());
  for (auto _ : state) {
    omp::transport_rhs(c, kHr, kCoeffs, out);
    benchmark::DoNotOptimize(out.data());
  }
  state.SetItemsProcessed(state.iterations() * static_cast<std::int64_t>(c.size()));
}
BENCHMARK(BM_TransportRhsOmp);

void BM_ResidualSerial(benchmark::State& state) {
  const auto a = random_field(1), b = random_field(2), c = random_field(3);
  std::vector<double> out(a.size());
  for (auto _ : state) {
    serial::residual_operator(a, b, c, kHr, kCoeffs, 5.0, out);
    benchmark::DoNotOptimize(out.data());
  }
  state.SetItemsProcessed(state.iterations() * static_cast<std::int64_t>(a.size()));
}
BENCHMARK(BM_ResidualSerial);

void BM_ResidualOmp(benchmark::State& state) {
  const auto a = random_field(1), b = random_field(2), c = random_field(3);
  std::vector<double> out(a.size());
  for (auto _ : state) {
    omp::residual_operator(a, b, c, kHr, kCoeffs, 5.0, out);
    benchmark::DoNotOptimize(out.data());
  }
  state.SetItemsProcessed(state.iterations() * static_cast<std::int64_t>(a.size()));
}
BENCHMARK(BM_ResidualOmp);

}  // namespace

BENCHMARK_MAIN();
