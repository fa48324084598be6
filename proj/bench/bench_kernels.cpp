// Serial reference kernels against their OpenMP counterparts.
#include "disscat/oracle.hpp"
#include "disscat/optical_model.hpp"
#include "disscat/scattering.hpp"
#include "disscat/singularity.hpp"

#include <benchmark/benchmark.h>

using namespace disscat;

namespace {

const DiscretizedSystem& system_200() {
  static const DiscretizedSystem sys = discretize(builtin_model("rank1-gauss"), 200);
  return sys;
}

void BM_TimeKernelSerial(benchmark::State& state) {
  const DiscretizedSystem& sys = system_200();
  const TimeGrid tg = default_time_grid(sys);
  for (auto _ : state) benchmark::DoNotOptimize(time_kernel_serial(sys.v, sys.eig_h, sys.h0.cast<cplx>(), tg));
}

void BM_TimeKernelParallel(benchmark::State& state) {
  const DiscretizedSystem& sys = system_200();
  const TimeGrid tg = default_time_grid(sys);
  for (auto _ : state) benchmark::DoNotOptimize(time_kernel_parallel(sys.v, sys.eig_h, sys.h0.cast<cplx>(), tg));
}

void BM_WaveMinus(benchmark::State& state) {
  const DiscretizedSystem& sys = system_200();
  const TimeGrid tg = default_time_grid(sys);
  const Exec exec = state.range(0) ? Exec::kParallel : Exec::kSerial;
  for (auto _ : state) benchmark::DoNotOptimize(wave_minus(sys, tg, exec));
}

void BM_SMatrixScan(benchmark::State& state) {
  const Model m = builtin_model("rank2-mixed");
  const std::vector<double> grid = interior_grid(m.lambda, 64);
  const Exec exec = state.range(0) ? Exec::kParallel : Exec::kSerial;
  for (auto _ : state) benchmark::DoNotOptimize(s_matrix_scan(m, grid, exec));
}

void BM_SingularityScan(benchmark::State& state) {
  const Model m = builtin_model("tuned-singularity");
  ScanOptions opts;
  opts.endpoints = false;
  opts.exec = state.range(0) ? Exec::kParallel : Exec::kSerial;
  for (auto _ : state) benchmark::DoNotOptimize(scan(m, 128, opts));
}

void BM_PartialWave(benchmark::State& state) {
  RadialProblem p;
  p.ell = static_cast<int>(state.range(0));
  p.v = RadialPotential::square_well(-2.0, 1.0);
  p.w = RadialPotential::square_well(0.5, 1.0);
  for (auto _ : state) benchmark::DoNotOptimize(solve_partial_wave(p, 1.7));
}

}  // namespace

BENCHMARK(BM_TimeKernelSerial)->Unit(benchmark::kMillisecond);
BENCHMARK(BM_TimeKernelParallel)->Unit(benchmark::kMillisecond);
BENCHMARK(BM_WaveMinus)->Arg(0)->Arg(1)->ArgName("parallel")->Unit(benchmark::kMillisecond);
BENCHMARK(BM_SMatrixScan)->Arg(0)->Arg(1)->ArgName("parallel")->Unit(benchmark::kMillisecond);
BENCHMARK(BM_SingularityScan)->Arg(0)->Arg(1)->ArgName("parallel")->Unit(benchmark::kMillisecond);
BENCHMARK(BM_PartialWave)->Arg(0)->Arg(4)->Arg(8)->ArgName("ell")->Unit(benchmark::kMicrosecond);

BENCHMARK_MAIN();
