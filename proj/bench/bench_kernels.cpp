#include "cbw/analytic.hpp"
#include "cbw/montecarlo.hpp"
#include "cbw/trace.hpp"

#include <benchmark/benchmark.h>

#include <numbers>

using namespace cbw;

namespace {

ScanConfig scan_for(std::int64_t windows)
{
    ScanConfig s;
    s.total_duration = static_cast<double>(windows) * SourceConfig{}.window_duration;
    s.rng_seed = 42;
    return s;
}

CascadeSpec order(int n)
{
    CascadeSpec s;
    s.order = n;
    return s;
}

template <class Fn>
void simulate(benchmark::State& state, Fn fn)
{
    const ScanConfig sc = scan_for(state.range(0));
    for (auto _ : state) {
        CountTrace t = fn(order(2), SourceConfig{}, DetectorConfig{}, DetectorConfig{}, LossChannel{}, sc);
        benchmark::DoNotOptimize(t.records.data());
    }
    state.SetItemsProcessed(state.iterations() * state.range(0));
}

void BM_SimulateParallel(benchmark::State& state) { simulate(state, &cbw::simulate_scan); }
void BM_SimulateSerial(benchmark::State& state) { simulate(state, &cbw::serial::simulate_scan); }

template <class Fn>
void binning(benchmark::State& state, Fn fn)
{
    const CountTrace t = simulate_scan(order(2), {}, {}, {}, {}, scan_for(state.range(0)));
    for (auto _ : state) {
        BinnedCounts b = fn(t, 500);
        benchmark::DoNotOptimize(b.counts_a.data());
    }
    state.SetItemsProcessed(state.iterations() * state.range(0));
}

void BM_BinParallel(benchmark::State& state) { binning(state, &cbw::bin_counts); }
void BM_BinSerial(benchmark::State& state) { binning(state, &cbw::serial::bin_counts); }

template <class Fn>
void fringes(benchmark::State& state, Fn fn)
{
    std::vector<double> phases(static_cast<std::size_t>(state.range(0)));
    for (std::size_t i = 0; i < phases.size(); ++i)
        phases[i] = 2 * std::numbers::pi * static_cast<double>(i) / static_cast<double>(phases.size());
    for (auto _ : state) {
        FringeSamples s = fn(3, phases);
        benchmark::DoNotOptimize(s.product.data());
    }
    state.SetItemsProcessed(state.iterations() * state.range(0));
}

void BM_FringesParallel(benchmark::State& state) { fringes(state, &cbw::evaluate_fringes); }
void BM_FringesSerial(benchmark::State& state) { fringes(state, &cbw::serial::evaluate_fringes); }

} // namespace

BENCHMARK(BM_SimulateParallel)->Arg(1 << 18)->Arg(2'500'000)->Unit(benchmark::kMillisecond)->UseRealTime();
BENCHMARK(BM_SimulateSerial)->Arg(1 << 18)->Arg(2'500'000)->Unit(benchmark::kMillisecond)->UseRealTime();
BENCHMARK(BM_BinParallel)->Arg(2'500'000)->Unit(benchmark::kMillisecond)->UseRealTime();
BENCHMARK(BM_BinSerial)->Arg(2'500'000)->Unit(benchmark::kMillisecond)->UseRealTime();
BENCHMARK(BM_FringesParallel)->Arg(1 << 20)->Unit(benchmark::kMillisecond)->UseRealTime();
BENCHMARK(BM_FringesSerial)->Arg(1 << 20)->Unit(benchmark::kMillisecond)->UseRealTime();

BENCHMARK_MAIN();
