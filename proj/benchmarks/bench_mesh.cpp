#include <benchmark/benchmark.h>

#include "conefield/mesh_disc.hpp"

using namespace conefield;

static void BM_BuildMesh(benchmark::State& state) {
    const double h = 1.0 / static_cast<double>(state.range(0));
    for (auto _ : state) {
        benchmark::DoNotOptimize(build_mesh(4.0, 4.0 * h, {{0.5, 0.0}}, 4.0));
    }
}
BENCHMARK(BM_BuildMesh)->Arg(32)->Arg(64)->Arg(128);

static void BM_RingFlux(benchmark::State& state) {
    const DiscMesh mesh = build_mesh(4.0, 1.0 / 16.0, {{0.0, 0.0}}, 2.0);
    std::vector<double> v(mesh.nodes.size());
    for (std::size_t i = 0; i < mesh.nodes.size(); ++i) {
        v[i] = -0.5 * mesh.nodes[i].norm();
    }
    const ScalarField f(mesh, v);
    for (auto _ : state) {
        benchmark::DoNotOptimize(boundary_ring_flux(f, 2.0, 512));
    }
}
BENCHMARK(BM_RingFlux);
