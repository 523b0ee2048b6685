// Serial per-state reference evolution vs the blocked, OpenMP-parallel kernel.

#include <benchmark/benchmark.h>

#include "vaet/dynamics.hpp"

namespace {

vaet::SystemConfig config(int n) {
  vaet::SystemConfig c;
  c.trimer = {{-0.5, 0.0, 0.5}, 0.1, 0.1, 0.0};
  c.mode_a = {0.52, 0.01, 1.5, n};
  c.mode_b = {0.52, 0.01, 1.5, n};
  return c;
}

void BM_SerialReference(benchmark::State& state) {
  const auto c = config(static_cast<int>(state.range(0)));
  const auto h = c.hamiltonian();
  const auto init = c.initial_weights();
  const auto times = vaet::time_grid(400.0, 0.5);
  for (auto _ : state) benchmark::DoNotOptimize(vaet::reference::propagate_trace_serial(h, init, times).max_p3);
}

void BM_Kernel(benchmark::State& state) {
  const auto c = config(static_cast<int>(state.range(0)));
  const auto h = c.hamiltonian();
  const auto init = c.initial_weights();
  const auto times = vaet::time_grid(400.0, 0.5);
  vaet::PropagationOptions opt;
  opt.workers = static_cast<int>(state.range(1));
  for (auto _ : state) benchmark::DoNotOptimize(vaet::propagate_trace(h, init, times, opt).max_p3);
}

}  // namespace

BENCHMARK(BM_SerialReference)->Arg(4)->Arg(6)->Arg(8)->Unit(benchmark::kMillisecond);
BENCHMARK(BM_Kernel)->Args({4, 1})->Args({6, 1})->Args({8, 1})->Args({8, 0})->Args({15, 0})->Unit(benchmark::kMillisecond);

BENCHMARK_MAIN();
