#include "shapeinv/forward_map.hpp"
#include "shapeinv/model_problem.hpp"

#include <benchmark/benchmark.h>

using namespace shapeinv;

static void BM_apply_ktilde_lorentz(benchmark::State& state) {
    const ModelProblem p;
    const auto a = exact_ansatz(p);
    const auto spec = KernelSpec::lorentz(static_cast<double>(state.range(0)));
    const double tol = 1e-11 * p.sum_rule();
    for (auto _ : state) {
        auto curve = apply_ktilde(a, spec, tol);
        benchmark::DoNotOptimize(curve.values.data());
    }
}
BENCHMARK(BM_apply_ktilde_lorentz)->Arg(2)->Arg(10)->Arg(100);

static void BM_apply_ktilde_laplace(benchmark::State& state) {
    const ModelProblem p;
    const auto a = exact_ansatz(p);
    const auto spec = KernelSpec::laplace();
    const double tol = 1e-11 * p.sum_rule();
    for (auto _ : state) {
        auto curve = apply_ktilde(a, spec, tol);
        benchmark::DoNotOptimize(curve.values.data());
    }
}
BENCHMARK(BM_apply_ktilde_laplace);

static void BM_transform_point(benchmark::State& state) {
    const ModelProblem p;
    const auto a = exact_ansatz(p);
    const auto spec = KernelSpec::lorentz(10.0);
    const double tol = 1e-11 * p.sum_rule();
    for (auto _ : state) {
        benchmark::DoNotOptimize(transform_point(a, spec, 10.0, tol));
    }
}
BENCHMARK(BM_transform_point);
