// Copyright 2026 The lorenzlab Authors
// SPDX-License-Identifier: Apache-2.0
//
// Serial reference kernels against their OpenMP counterparts. The second
// argument selects the path: 0 serial, 1 parallel.

#include "lorenzlab/borel_cantelli.hpp"
#include "lorenzlab/correlation.hpp"
#include "lorenzlab/evt.hpp"
#include "lorenzlab/measure.hpp"

#include <benchmark/benchmark.h>

namespace {

using namespace lorenzlab;

const ModelParams kParams;

Exec exec_of(const benchmark::State& state) { return state.range(1) ? Exec::parallel : Exec::serial; }

const EmpiricalMeasure& lorenz_measure()
{
    static const EmpiricalMeasure m = [] {
        MeasureOptions o;
        o.members = 8;
        return build_empirical_measure(MapKind::lorenz, kParams, 4000000, 1000, 1, o);
    }();
    return m;
}

SectionPoint center() { return generic_center(lorenz_measure(), kParams, 1, 1e-3); }

void BM_BuildMeasure(benchmark::State& state)
{
    MeasureOptions o;
    o.members = 8;
    o.exec = exec_of(state);
    for (auto _ : state) {
        auto m = build_empirical_measure(MapKind::lorenz, kParams, static_cast<std::size_t>(state.range(0)), 1000, 1, o);
        benchmark::DoNotOptimize(m.size());
    }
    state.SetItemsProcessed(state.iterations() * state.range(0));
}
BENCHMARK(BM_BuildMeasure)->Args({1000000, 0})->Args({1000000, 1})->Unit(benchmark::kMillisecond);

void BM_Sbc(benchmark::State& state)
{
    const auto& m = lorenz_measure();
    const auto targets = build_targets(m, center(), Shape::square, 0.6, 100000);
    SbcOptions o;
    o.ensemble = 32;
    o.exec = exec_of(state);
    const auto source = OrbitSource::dynamics(MapKind::lorenz, kParams);
    for (auto _ : state) {
        auto r = run_sbc(source, targets, targets.size(), o);
        benchmark::DoNotOptimize(r.terminal_mean());
    }
    state.SetItemsProcessed(state.iterations() * static_cast<std::int64_t>(targets.size()) * 32);
}
BENCHMARK(BM_Sbc)->Args({0, 0})->Args({0, 1})->Unit(benchmark::kMillisecond);

void BM_BlockMaxima(benchmark::State& state)
{
    const auto& m = lorenz_measure();
    const Observable obs{center(), Shape::ball};
    const auto fit = fit_scaling(m, obs);
    const auto sched = levels(m, obs, {-1.0, 0.0, 1.0, 2.0}, {10000}, fit.dimension);
    const std::vector<Level> lv(sched.entries.begin(), sched.entries.end());
    MaximaOptions o;
    o.n = 10000;
    o.trials = static_cast<std::size_t>(state.range(0));
    o.exec = exec_of(state);
    const auto source = OrbitSource::dynamics(MapKind::lorenz, kParams);
    for (auto _ : state) {
        auto r = block_maxima_cdf(source, obs, lv, o);
        benchmark::DoNotOptimize(r.rows.front().p_hat);
    }
    state.SetItemsProcessed(state.iterations() * state.range(0) * 10000);
}
BENCHMARK(BM_BlockMaxima)->Args({200, 0})->Args({200, 1})->Unit(benchmark::kMillisecond);

void BM_Correlation(benchmark::State& state)
{
    CorrObservable psi;
    for (auto _ : state) {
        auto r = corr_estimate(MapKind::lorenz, kParams, psi, static_cast<std::size_t>(state.range(0)), 10000000, 1, 10,
                               exec_of(state));
        benchmark::DoNotOptimize(r.variance);
    }
}
BENCHMARK(BM_Correlation)->Args({20, 0})->Args({20, 1})->Unit(benchmark::kMillisecond)->Iterations(1);

} // namespace

BENCHMARK_MAIN();
