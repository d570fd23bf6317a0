#include "plates/assembly.hpp"
#include "plates/basis.hpp"
#include "plates/material.hpp"
#include "plates/mesh.hpp"

#include <benchmark/benchmark.h>

using namespace plates;

namespace {

const SimplicialComplex3& reduced_slab()
{
    static const SimplicialComplex3 kp =
        barycentric_subdivide(generate_slab_mesh(Vec3(0.02, 0.01, 0.04), Vec3(0.01, 0.005, 0.01)));
    return kp;
}

Execution execution(const benchmark::State& state)
{
    return state.range(0) == 0 ? Execution::Serial : Execution::Parallel;
}

void BM_Gram(benchmark::State& state)
{
    const auto& kp = reduced_slab();
    const BasisIndex b = coarse_basis(kp);
    for (auto _ : state)
        benchmark::DoNotOptimize(assemble_gram(kp, b, execution(state)));
    state.SetItemsProcessed(state.iterations() * kp.num_tets());
}

void BM_Stiffness(benchmark::State& state)
{
    const auto& kp = reduced_slab();
    const BasisIndex b = coarse_basis(kp);
    const ElasticTensor w = spruce_engelmann();
    for (auto _ : state)
        benchmark::DoNotOptimize(assemble_stiffness(kp, b, w, 1.0, execution(state)));
    state.SetItemsProcessed(state.iterations() * kp.num_tets());
}

}  // namespace

// argument 0 is the serial reference path, 1 the OpenMP path
BENCHMARK(BM_Gram)->Arg(0)->Arg(1)->Unit(benchmark::kMillisecond);
BENCHMARK(BM_Stiffness)->Arg(0)->Arg(1)->Unit(benchmark::kMillisecond);

BENCHMARK_MAIN();
