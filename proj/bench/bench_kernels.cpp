// OpenMP kernels against their serial reference implementations.
// Run with OMP_NUM_THREADS set to compare thread counts.
#include <benchmark/benchmark.h>

#include "lightam/fieldsynth.hpp"
#include "lightam/jet_field.hpp"
#include "lightam/modes.hpp"
#include "lightam/parallel.hpp"

using namespace lightam;

namespace {

const JetField& field() {
    static const JetField f = random_field(7);
    return f;
}

GridPtr grid(int nk) { return make_sphere_grid(nk, 24, 24, 0.0, 2.5); }

void BM_SampleParallel(benchmark::State& st) {
    const GridPtr g = grid(static_cast<int>(st.range(0)));
    for (auto _ : st) benchmark::DoNotOptimize(sample_raw(field(), g));
    st.SetItemsProcessed(st.iterations() * static_cast<std::int64_t>(g->size()));
}

void BM_SampleSerial(benchmark::State& st) {
    const GridPtr g = grid(static_cast<int>(st.range(0)));
    for (auto _ : st) benchmark::DoNotOptimize(reference::sample_raw_serial(field(), g));
    st.SetItemsProcessed(st.iterations() * static_cast<std::int64_t>(g->size()));
}

void BM_NormParallel(benchmark::State& st) {
    const TransverseAmplitude v = sample(field(), grid(static_cast<int>(st.range(0))));
    const KGrid& g = v.grid();
    for (auto _ : st)
        benchmark::DoNotOptimize(parallel_sum<double>(v.size(), [&](std::size_t i) { return g.weight(i) * norm2(v[i]); }));
}

void BM_NormSerial(benchmark::State& st) {
    const TransverseAmplitude v = sample(field(), grid(static_cast<int>(st.range(0))));
    const KGrid& g = v.grid();
    for (auto _ : st)
        benchmark::DoNotOptimize(
            reference::serial_sum<double>(v.size(), [&](std::size_t i) { return g.weight(i) * norm2(v[i]); }));
}

std::vector<Vec3d> probes(int n) {
    std::vector<Vec3d> x;
    for (int i = 0; i < n; ++i) x.push_back({0.3 * i - 5.0, 0.1 * i, -0.2 * i + 2.0});
    return x;
}

void BM_ProbesParallel(benchmark::State& st) {
    const TransverseAmplitude v = sample(field(), grid(16));
    const auto x = probes(static_cast<int>(st.range(0)));
    for (auto _ : st) benchmark::DoNotOptimize(synthesize_points(v, x, 0.0, Quantity::E));
}

void BM_ProbesSerial(benchmark::State& st) {
    const TransverseAmplitude v = sample(field(), grid(16));
    const auto x = probes(static_cast<int>(st.range(0)));
    for (auto _ : st) benchmark::DoNotOptimize(reference::synthesize_points_serial(v, x, 0.0, Quantity::E));
}

}  // namespace

BENCHMARK(BM_SampleParallel)->Arg(16)->Arg(32)->Unit(benchmark::kMillisecond);
BENCHMARK(BM_SampleSerial)->Arg(16)->Arg(32)->Unit(benchmark::kMillisecond);
BENCHMARK(BM_NormParallel)->Arg(32)->Arg(64);
BENCHMARK(BM_NormSerial)->Arg(32)->Arg(64);
BENCHMARK(BM_ProbesParallel)->Arg(8)->Arg(64)->Unit(benchmark::kMillisecond);
BENCHMARK(BM_ProbesSerial)->Arg(8)->Arg(64)->Unit(benchmark::kMillisecond);

BENCHMARK_MAIN();
