// Serial reference kernels against their OpenMP counterparts.
//
//   ./build/bench/kerrmi_bench --benchmark_filter=Moments
//   OMP_NUM_THREADS=8 ./build/bench/kerrmi_bench

#include <benchmark/benchmark.h>

#include <cmath>

#include "kerrmi/core.hpp"
#include "kerrmi/fock.hpp"
#include "kerrmi/sweep.hpp"

namespace {

using namespace kerrmi;

fock::TwoModeState evolved_state(int dim) {
    const double mu = std::max(1.0, (dim - 20.0) / 4.0);
    auto s = fock::product_input(std::sqrt(2.0 * mu), static_cast<std::size_t>(dim));
    return fock::apply_kerr(s, 0.3, 0.32, 0.1);
}

void BM_MomentsSerial(benchmark::State& state) {
    const auto s = evolved_state(static_cast<int>(state.range(0)));
    for (auto _ : state) {
        benchmark::DoNotOptimize(fock::moments_serial(s));
    }
}

void BM_MomentsParallel(benchmark::State& state) {
    const auto s = evolved_state(static_cast<int>(state.range(0)));
    for (auto _ : state) {
        benchmark::DoNotOptimize(fock::moments(s));
    }
}

void BM_KerrSerial(benchmark::State& state) {
    const auto s = evolved_state(static_cast<int>(state.range(0)));
    for (auto _ : state) {
        benchmark::DoNotOptimize(fock::apply_kerr_serial(s, 1.0, 1.1, 0.05));
    }
}

void BM_KerrParallel(benchmark::State& state) {
    const auto s = evolved_state(static_cast<int>(state.range(0)));
    for (auto _ : state) {
        benchmark::DoNotOptimize(fock::apply_kerr(s, 1.0, 1.1, 0.05));
    }
}

std::vector<sweep::GridSpec> grids(std::int64_t points) {
    return {sweep::GridSpec::parse("tau=1e-12:1e-9:" + std::to_string(points) + ":log"),
            sweep::GridSpec::parse("sigma=0:0.1:" + std::to_string(points))};
}

void BM_SweepSerial(benchmark::State& state) {
    const auto base = preset("giant-eit").parameters();
    const auto g = grids(state.range(0));
    for (auto _ : state) {
        benchmark::DoNotOptimize(sweep::run_sweep_serial(base, g));
    }
    state.SetItemsProcessed(state.iterations() * state.range(0) * state.range(0));
}

void BM_SweepParallel(benchmark::State& state) {
    const auto base = preset("giant-eit").parameters();
    const auto g = grids(state.range(0));
    for (auto _ : state) {
        benchmark::DoNotOptimize(sweep::run_sweep(base, g));
    }
    state.SetItemsProcessed(state.iterations() * state.range(0) * state.range(0));
}

double harmonic(double phi) { return std::sin(phi + 0.6); }

void BM_MonteCarloSerial(benchmark::State& state) {
    for (auto _ : state) {
        benchmark::DoNotOptimize(fock::monte_carlo_phase_serial(harmonic, 0.3, 100'000, 42));
    }
}

void BM_MonteCarloParallel(benchmark::State& state) {
    for (auto _ : state) {
        benchmark::DoNotOptimize(fock::monte_carlo_phase(harmonic, 0.3, 100'000, 42));
    }
}

}  // namespace

BENCHMARK(BM_MomentsSerial)->Arg(68)->Arg(200)->Arg(600);
BENCHMARK(BM_MomentsParallel)->Arg(68)->Arg(200)->Arg(600);
BENCHMARK(BM_KerrSerial)->Arg(68)->Arg(600);
BENCHMARK(BM_KerrParallel)->Arg(68)->Arg(600);
BENCHMARK(BM_SweepSerial)->Arg(50)->Arg(300);
BENCHMARK(BM_SweepParallel)->Arg(50)->Arg(300);
BENCHMARK(BM_MonteCarloSerial);
BENCHMARK(BM_MonteCarloParallel);

BENCHMARK_MAIN();
