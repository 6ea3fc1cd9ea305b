#include <benchmark/benchmark.h>

#include "levysim/jump_adapted.hpp"
#include "levysim/mc.hpp"

namespace {

using namespace levysim;

CgmyParams dataset2() { return {0.1, 1.5, 3.5, 2.0}; }

void BM_TailSample(benchmark::State& state) {
    const auto measure = cgmy_measure(dataset2());
    const TailSampler sampler(measure, 0.05);
    RngStream stream = stream_for(1, 0);
    for (auto _ : state) {
        benchmark::DoNotOptimize(sampler.sample(stream));
    }
}
BENCHMARK(BM_TailSample);

void BM_SchemeStep(benchmark::State& state) {
    const SchemeKind kind = static_cast<SchemeKind>(state.range(0));
    SdeCoefficients coeffs;
    coeffs.b = Coefficient::linear(0.5);
    coeffs.sigma = Coefficient::linear(0.3);
    coeffs.h = Coefficient::linear(1.0);
    EffectiveDrift drift;
    drift.gamma_bar = 0.1;
    drift.b_bar = Coefficient::linear(0.6);
    RngStream stream = stream_for(2, 0);
    double x = 1.0;
    for (auto _ : state) {
        x = scheme_step(kind, coeffs, drift, x, 0.05, stream);
        if (!(x > 0.0) || x > 1e6) x = 1.0;
        benchmark::DoNotOptimize(x);
    }
}
BENCHMARK(BM_SchemeStep)->Arg(0)->Arg(1)->Arg(2);

void BM_SimulatePath(benchmark::State& state) {
    const auto measure = cgmy_measure(dataset2());
    const auto model = make_exponential_model(measure, 0.5, 0.3);
    const auto approx = build_approx(measure, static_cast<int>(state.range(0)), 8.0);
    const PathSimulator sim(model, approx, SchemeKind::wt2, StepperConfig{});
    uint64_t index = 0;
    for (auto _ : state) {
        RngStream stream = stream_for(3, index++);
        benchmark::DoNotOptimize(sim.run(stream).x_final);
    }
}
BENCHMARK(BM_SimulatePath)->Arg(2)->Arg(3)->Arg(4);

void BM_BuildApprox(benchmark::State& state) {
    const auto measure = cgmy_measure(dataset2());
    for (auto _ : state) {
        benchmark::DoNotOptimize(build_approx(measure, 4, 16.0).epsilon);
    }
}
BENCHMARK(BM_BuildApprox);

}  // namespace

BENCHMARK_MAIN();
