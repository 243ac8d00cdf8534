#include <benchmark/benchmark.h>

#include "reclab/experiments.hpp"
#include "reclab/systems.hpp"
#include "reclab/targets.hpp"

using namespace reclab;

namespace
{
void run_steps(benchmark::State& state, SystemSpec const& sys, SpaceSpec const& space)
{
    RngStream rng(1, 1);
    OrbitState orbit(sys, sample_uniform(space, rng), rng);
    for (auto _ : state)
    {
        step(sys, orbit);
        benchmark::DoNotOptimize(orbit.current());
    }
    state.SetItemsProcessed(state.iterations());
}

void BM_CatMapStep(benchmark::State& state)
{
    run_steps(state, SystemSpec::cat_map(), SpaceSpec::torus(2));
}
BENCHMARK(BM_CatMapStep);

void BM_ShiftMapStep(benchmark::State& state)
{
    run_steps(state, SystemSpec::shift_map(), SpaceSpec::circle());
}
BENCHMARK(BM_ShiftMapStep);

void BM_ShiftMapBase3Step(benchmark::State& state)
{
    run_steps(state, SystemSpec::shift_map(3), SpaceSpec::circle());
}
BENCHMARK(BM_ShiftMapBase3Step);

// One SBC seed over n_max steps; grid densities pay for radius bisection.
void BM_SbcSeed(benchmark::State& state)
{
    auto const n_max = state.range(0);
    bool const density = state.range(1) != 0;
    auto measure = density ? MeasureSpec::grid_density(2, 2, {1.5, 0.5, 0.5, 1.5})
                           : MeasureSpec::lebesgue();
    auto seq = TargetSequence::power(1, 0.9, n_max);
    SbcOptions opts;
    opts.override_assumption1 = true;
    for (auto _ : state)
    {
        auto res = run_sbc(SystemSpec::cat_map(), measure, SpaceSpec::torus(2), seq, n_max, 1,
                           opts);
        benchmark::DoNotOptimize(res.mean_ratio);
    }
    state.SetItemsProcessed(state.iterations() * n_max);
}
BENCHMARK(BM_SbcSeed)->Args({10000, 0})->Args({10000, 1})->Unit(benchmark::kMillisecond);

void BM_RadiusBisection(benchmark::State& state)
{
    auto measure = MeasureSpec::grid_density(2, 8, std::vector<double>(64, 1.0));
    auto space = SpaceSpec::torus(2);
    Point x = Point::from_reals({0.3, 0.7});
    double mass = 0.5;
    for (auto _ : state)
    {
        benchmark::DoNotOptimize(invert_radius(measure, space, x, mass, bisection_tolerance));
        mass = mass * 0.999 + 1e-6;
    }
}
BENCHMARK(BM_RadiusBisection);
}  // namespace
