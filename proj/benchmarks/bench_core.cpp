#include <benchmark/benchmark.h>

#include <numbers>

#include "schrolab/limitlaw.hpp"
#include "schrolab/oracle.hpp"
#include "schrolab/randfield.hpp"
#include "schrolab/solver.hpp"
#include "schrolab/theory.hpp"

using namespace schrolab;

namespace {

constexpr double kPi = std::numbers::pi;

RealizationSetup setup_for(std::size_t n, int oversize) {
    RealizationSetup s;
    s.eps = 0.07;
    s.alpha = 2.0 / 3.0;
    s.wave_grid = {1, n, 16 * kPi};
    s.field_oversize = oversize;
    s.probes = {{1.0}};
    s.times = {1.0};
    return s;
}

void BM_StrangStep(benchmark::State& state) {
    const auto s = setup_for(static_cast<std::size_t>(state.range(0)), 1);
    const auto m = make_effective_medium(s);
    auto wave = init_wave(s.packet, s.wave_grid, 1.0);
    StrangStepper st(s.wave_grid, m->grid);
    FieldState f = draw_stationary(m, RngStream(1, 0, StreamPurpose::FieldStep));
    const double dt = 0.01;
    f.advance(dt / 2);
    for (auto _ : state) {
        st.step(wave, f, dt);
        f.advance(dt);
    }
    state.SetItemsProcessed(state.iterations());
}
BENCHMARK(BM_StrangStep)->RangeMultiplier(4)->Range(256, 32768);

void BM_FieldAdvance(benchmark::State& state) {
    const auto s = setup_for(256, static_cast<int>(state.range(0)));
    const auto m = make_effective_medium(s);
    FieldState f = draw_stationary(m, RngStream(2, 0, StreamPurpose::FieldStep));
    for (auto _ : state) f.advance(0.01);
    state.counters["modes"] = static_cast<double>(m->representatives.size());
}
BENCHMARK(BM_FieldAdvance)->RangeMultiplier(8)->Range(1, 1024);

void BM_FieldEvaluate(benchmark::State& state) {
    const auto s = setup_for(256, static_cast<int>(state.range(0)));
    const auto m = make_effective_medium(s);
    FieldState f = draw_stationary(m, RngStream(3, 0, StreamPurpose::FieldStep));
    FieldEvaluator ev(m->grid);
    std::vector<double> v;
    for (auto _ : state) benchmark::DoNotOptimize(ev(f, v));
}
BENCHMARK(BM_FieldEvaluate)->RangeMultiplier(8)->Range(1, 1024);

void BM_CriticalSample(benchmark::State& state) {
    CriticalLimitSampler s(medium_a(), InitialPacket{}, 1.0, 1.0);
    std::uint64_t i = 0;
    for (auto _ : state) benchmark::DoNotOptimize(s.sample(5, i++));
}
BENCHMARK(BM_CriticalSample)->Unit(benchmark::kMicrosecond);

void BM_K2Table(benchmark::State& state) {
    const K2Table table(medium_b(), 40.0);
    double r = 0.0;
    for (auto _ : state) {
        benchmark::DoNotOptimize(table(r));
        r += 0.37;
        if (r > 40.0) r -= 40.0;
    }
}
BENCHMARK(BM_K2Table);

void BM_K2Direct(benchmark::State& state) {
    const double xi[1] = {1.0};
    for (auto _ : state) benchmark::DoNotOptimize(k2(medium_b(), 0.5, xi));
}
BENCHMARK(BM_K2Direct)->Unit(benchmark::kMicrosecond);

void BM_LimitTermK2(benchmark::State& state) {
    const auto p = oracle::pairings(4)[1];
    oracle::McOptions opt;
    opt.samples = 1u << 16;
    for (auto _ : state) benchmark::DoNotOptimize(oracle::limit_term(medium_a(), p, 1.0, opt));
}
BENCHMARK(BM_LimitTermK2)->Unit(benchmark::kMillisecond);

}  // namespace
BENCHMARK_MAIN();
