#include <benchmark/benchmark.h>

#include "convspectra/fourier.hpp"
#include "convspectra/oracle.hpp"
#include "convspectra/projection.hpp"
#include "convspectra/spectra.hpp"
#include "convspectra/svd.hpp"

using namespace convspectra;

namespace {

void BM_ComputeSpectrum(benchmark::State& state) {
  const auto m = static_cast<std::size_t>(state.range(0));
  const Kernel4D kernel = random_normal_kernel({3, 3, m, m}, 1);
  for (auto _ : state) benchmark::DoNotOptimize(compute_spectrum(kernel, {16, 16}));
}
BENCHMARK(BM_ComputeSpectrum)->RangeMultiplier(2)->Range(4, 32)->Unit(benchmark::kMillisecond);

void BM_FullMatrixSpectrum(benchmark::State& state) {
  const auto n = static_cast<std::size_t>(state.range(0));
  const Kernel4D kernel = random_normal_kernel({3, 3, 2, 2}, 1);
  for (auto _ : state) benchmark::DoNotOptimize(oracle::dense_spectrum(kernel, {n, n}));
}
BENCHMARK(BM_FullMatrixSpectrum)->Arg(8)->Arg(16)->Arg(24)->Unit(benchmark::kMillisecond);

void BM_Dft2(benchmark::State& state) {
  const auto n = static_cast<std::size_t>(state.range(0));
  ComplexGrid grid{n, n, std::vector<Complex>(n * n, Complex(1.0, 0.5))};
  for (auto _ : state) benchmark::DoNotOptimize(dft2(grid, Direction::Forward));
}
BENCHMARK(BM_Dft2)->Arg(16)->Arg(17)->Arg(32)->Arg(63)->Arg(64);

void BM_SvdBatch(benchmark::State& state) {
  const auto m = static_cast<std::size_t>(state.range(0));
  const FrequencyTransforms t = frequency_transforms(random_normal_kernel({3, 3, m, m}, 2), {16, 16});
  const std::vector<ComplexMatrix> bins = t.bin_matrices();
  for (auto _ : state) benchmark::DoNotOptimize(svd_batch(bins, false));
}
BENCHMARK(BM_SvdBatch)->Arg(4)->Arg(16)->Unit(benchmark::kMillisecond);

void BM_ClipOperatorNorm(benchmark::State& state) {
  const auto m = static_cast<std::size_t>(state.range(0));
  const Kernel4D kernel = random_normal_kernel({3, 3, m, m}, 3);
  for (auto _ : state) benchmark::DoNotOptimize(clip_operator_norm(kernel, {16, 16}, 1.0));
}
BENCHMARK(BM_ClipOperatorNorm)->Arg(4)->Arg(16)->Unit(benchmark::kMillisecond);

}  // namespace
BENCHMARK_MAIN();
