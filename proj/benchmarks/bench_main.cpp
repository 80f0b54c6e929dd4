#include <benchmark/benchmark.h>

#include "epinet/equilibria.hpp"
#include "epinet/integrator.hpp"
#include "epinet/nmpc.hpp"

#include <vector>

using namespace epinet;

static void BM_RhsConstant(benchmark::State& state) {
    SystemParams p;
    const ModelState x{10.0, 99.0, 1.0, 9801.0};
    const ControlInput u{1.0, 0.01};
    for (auto _ : state)
        benchmark::DoNotOptimize(rhs_constant(x, p, u, ClosureMode::Rollout));
}
BENCHMARK(BM_RhsConstant);

static void BM_StepF(benchmark::State& state) {
    SystemParams p;
    const ModelState x = initial_state(p);
    const ControlInput u{1.0, 0.001};
    IntegratorOptions opt;
    opt.substeps = static_cast<int>(state.range(0));
    for (auto _ : state)
        benchmark::DoNotOptimize(step_F(x, u, 0.1, p, SystemKind::Nmpc, opt));
}
BENCHMARK(BM_StepF)->Arg(20)->Arg(80);

static void BM_EndemicState(benchmark::State& state) {
    SystemParams p;
    const ControlInput u{10.0, 0.1};
    for (auto _ : state) benchmark::DoNotOptimize(endemic_state(p, u));
}
BENCHMARK(BM_EndemicState);

static void BM_ObjectiveJ(benchmark::State& state) {
    SystemParams p;
    p.tau = 1.0;
    NmpcConfig cfg;
    cfg.M1 = 7.8;
    cfg.M2 = 0.5;
    cfg.P = static_cast<int>(state.range(0));
    const ModelState x = initial_state(p);
    const std::vector<ControlInput> seq(cfg.P, ControlInput{3.0, 0.1});
    for (auto _ : state)
        benchmark::DoNotOptimize(objective_J(seq, x, {0.0, 0.0}, cfg, p));
}
BENCHMARK(BM_ObjectiveJ)->Arg(3)->Arg(5)->Arg(8);

static void BM_OptimizeHorizon(benchmark::State& state) {
    SystemParams p;
    p.tau = 1.0;
    NmpcConfig cfg;
    cfg.M1 = 7.8;
    cfg.M2 = 0.5;
    cfg.P = 3;
    cfg.max_iters = 50;
    const ModelState x = initial_state(p);
    for (auto _ : state)
        benchmark::DoNotOptimize(optimize_horizon(x, {0.0, 0.0}, cfg, p));
}
BENCHMARK(BM_OptimizeHorizon);

BENCHMARK_MAIN();
