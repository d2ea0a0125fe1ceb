#include <benchmark/benchmark.h>

#include "conefield/fundamental_radial.hpp"

using namespace conefield;

static void BM_PhiNd(benchmark::State& state) {
    const Dimension d3(3);
    double r = 0.0;
    for (auto _ : state) {
        benchmark::DoNotOptimize(phi_nd(d3, 4.0, r, 1e-10));
        r = r < 20.0 ? r + 0.1 : 0.0;
    }
}
BENCHMARK(BM_PhiNd);

static void BM_RadialDirichlet(benchmark::State& state) {
    const Dimension d3(3);
    const int n = static_cast<int>(state.range(0));
    const RadialSource src = RadialSource::mollified_pole(d3, 1.0, n);
    const auto grid = make_radial_grid(10.0, 1024);
    for (auto _ : state) {
        benchmark::DoNotOptimize(radial_dirichlet(d3, src, 10.0, grid));
    }
}
BENCHMARK(BM_RadialDirichlet)->Arg(4)->Arg(64);
