#include <benchmark/benchmark.h>

#include "reclab/geometry.hpp"

using namespace reclab;

namespace
{
void BM_MaximalPacking(benchmark::State& state)
{
    double const eps = 1.0 / static_cast<double>(state.range(0));
    auto space = SpaceSpec::torus(2);
    for (auto _ : state)
    {
        RngStream rng(2, 2);
        auto p = maximal_packing(space, eps, 1000, rng);
        benchmark::DoNotOptimize(p.count());
    }
}
BENCHMARK(BM_MaximalPacking)->Arg(20)->Arg(80)->Unit(benchmark::kMillisecond);

void BM_CellOf(benchmark::State& state)
{
    auto space = SpaceSpec::torus(2);
    RngStream rng(3, 3);
    Partition part(space, maximal_packing(space, 0.01, 1000, rng));
    for (auto _ : state)
        benchmark::DoNotOptimize(part.cell_of(sample_uniform(space, rng)));
}
BENCHMARK(BM_CellOf);

void BM_Mollifier(benchmark::State& state)
{
    auto space = SpaceSpec::torus(2, state.range(0) ? Metric::euclidean : Metric::chebyshev);
    RngStream rng(4, 4);
    Partition part(space, maximal_packing(space, 0.05, 1000, rng));
    MollifierSet h(part, 0.01);
    for (auto _ : state)
    {
        Point x = sample_uniform(space, rng);
        double sum = 0;
        for (auto k : h.candidates(x))
            sum += h(k, x);
        benchmark::DoNotOptimize(sum);
    }
}
BENCHMARK(BM_Mollifier)->Arg(0)->Arg(1);
}  // namespace
