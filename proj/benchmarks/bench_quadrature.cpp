#include "shapeinv/model_problem.hpp"
#include "shapeinv/quadrature.hpp"

#include <benchmark/benchmark.h>

#include <cmath>

using namespace shapeinv;

static void BM_semi_infinite_scalar(benchmark::State& state) {
    const double tol = std::pow(10.0, -state.range(0));
    SemiInfiniteDomain dom;
    dom.threshold_exponent = 0.5;
    dom.tail_scale = 1.0;
    for (auto _ : state) {
        auto r = integrate_semi_infinite(
            [](double E) { return std::exp(-E) / std::sqrt(E); }, dom, tol);
        benchmark::DoNotOptimize(r.value);
    }
}
BENCHMARK(BM_semi_infinite_scalar)->Arg(8)->Arg(10)->Arg(12);

static void BM_gauss_laguerre(benchmark::State& state) {
    for (auto _ : state) {
        auto rule = gauss_laguerre(static_cast<int>(state.range(0)));
        benchmark::DoNotOptimize(rule.nodes.data());
    }
}
BENCHMARK(BM_gauss_laguerre)->Arg(48)->Arg(248);
