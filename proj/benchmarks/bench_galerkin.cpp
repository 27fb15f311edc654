#include "shapeinv/model_problem.hpp"

#include <benchmark/benchmark.h>

using namespace shapeinv;

static void BM_galerkin_input(benchmark::State& state) {
    const ModelProblem p;
    const auto spec = KernelSpec::lorentz(10.0);
    const int n0 = static_cast<int>(state.range(0));
    for (auto _ : state) {
        auto in = galerkin_input(p, spec, n0);
        benchmark::DoNotOptimize(in.phi.data());
    }
}
BENCHMARK(BM_galerkin_input)->Arg(10)->Arg(60);

static void BM_kinetic_matrix(benchmark::State& state) {
    const int n0 = static_cast<int>(state.range(0));
    for (auto _ : state) {
        auto t = galerkin::kinetic_matrix(n0, 0.3, 20.7212603615);
        benchmark::DoNotOptimize(t.data());
    }
}
BENCHMARK(BM_kinetic_matrix)->Arg(10)->Arg(60);
