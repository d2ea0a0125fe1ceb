#include <benchmark/benchmark.h>

#include "conefield/variational_solver.hpp"

using namespace conefield;

static void BM_SolveSinglePole(benchmark::State& state) {
    const double R = 2.0;
    const double h = R / static_cast<double>(state.range(0));
    const DiscMesh mesh = build_mesh(R, h, {{0.0, 0.0}}, 2.0);
    const PoleConfig poles(Dimension(2), {{{0.0, 0.0}, 1.0}}, 1.0);
    const SourceField source(poles, 8);
    SolverConfig cfg;
    cfg.eps_cap = {1e-1, 1e-2, 1e-3};
    for (auto _ : state) {
        benchmark::DoNotOptimize(solve_dirichlet(mesh, source, cfg));
    }
}
BENCHMARK(BM_SolveSinglePole)->Arg(16)->Arg(32)->Arg(64)->Unit(benchmark::kMillisecond);

BENCHMARK_MAIN();
