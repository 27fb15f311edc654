#include "shapeinv/fitter.hpp"
#include "shapeinv/metrics.hpp"
#include "shapeinv/model_problem.hpp"

#include <doctest.h>

#include <stdexcept>

#include <cmath>
#include <limits>

using namespace shapeinv;

namespace {

// small grids keep the unit tests quick; the full-size runs live in the
// acceptance suite
SampledInput small_lorentz_input() {
    const ModelProblem p;
    return exact_input(p, KernelSpec::lorentz(10.0, -2.0, 41.4, 40));
}

ScanConfig small_config(const SampledInput& input) {
    ScanConfig cfg;
    cfg.sum_rule_active = true;
    cfg.sum_rule_value = input.sum_rule;
    cfg.levels = 3;
    return cfg;
}

}  // namespace

TEST_CASE("objective at the true parameters sits at the quadrature floor") {
    const ModelProblem p;
    const auto input = small_lorentz_input();
    const auto cfg = small_config(input);
    const auto a = exact_ansatz(p);
    const double obj = objective(a, input, effective_quad_tol(input, cfg));
    CHECK(obj < 1e-16);
}

TEST_CASE("objective of the zero model counts the samples") {
    const ModelProblem p;
    const auto input = small_lorentz_input();
    ShapeAnsatz a = exact_ansatz(p);
    a.C = 0.0;
    const double obj = objective(a, input, 1e-13);
    CHECK(obj == doctest::Approx(double(input.phi.size())).epsilon(1e-12));
}

TEST_CASE("perturbing Ebar away from the truth increases the objective") {
    const ModelProblem p;
    const auto input = small_lorentz_input();
    const double tol = 1e-13;
    ShapeAnsatz a = exact_ansatz(p);
    const double at_truth = objective(a, input, tol);
    ShapeAnsatz b = a;
    b.Ebar *= 1.01;
    b = normalize_C(eliminate_root(b, 0), 0.25);
    CHECK(objective(b, input, tol) > at_truth);
}

TEST_CASE("grid scan lands within one refined cell of the true parameters") {
    const ModelProblem p;
    const auto input = small_lorentz_input();
    auto cfg = small_config(input);
    const auto seeds = grid_scan(input, cfg);
    REQUIRE(seeds.size() == 1);  // top_k = 1
    const auto& a = seeds.front().ansatz;
    // final-level spacing: three levels of ~10x refinement from the start
    const double step0 = std::log(256.0) / (cfg.ebar_points - 1);
    const double step_final = step0 * std::pow(2.0 / (cfg.ebar_points - 1.0), 2);
    CHECK(std::abs(std::log(a.Ebar / p.E0())) < 1.5 * step_final);
    CHECK(std::abs(std::log(a.beta / 5.0)) < 1.5 * step_final * 2.0);
    CHECK_FALSE(seeds.front().scan_trace.empty());
}

TEST_CASE("scaling input and sum rule together leaves the argmin unchanged") {
    const auto input = small_lorentz_input();
    auto cfg = small_config(input);
    cfg.levels = 2;
    const auto base = grid_scan(input, cfg);

    SampledInput scaled = input;
    for (auto& v : scaled.phi) v *= 3.7;
    for (std::size_t i = 0; i < scaled.weights.size(); ++i)
        scaled.weights[i] = 1.0 / (scaled.phi[i] * scaled.phi[i]);
    scaled.sum_rule *= 3.7;
    auto cfg2 = cfg;
    cfg2.sum_rule_value = scaled.sum_rule;
    const auto seeds2 = grid_scan(scaled, cfg2);
    CHECK(seeds2.front().ansatz.Ebar == base.front().ansatz.Ebar);
    CHECK(seeds2.front().ansatz.beta == base.front().ansatz.beta);
}

TEST_CASE("refine: already-optimal seed stays put, objective never worsens") {
    const ModelProblem p;
    const auto input = small_lorentz_input();
    auto cfg = small_config(input);
    const double tol = effective_quad_tol(input, cfg);

    FitResult seed;
    seed.ansatz = exact_ansatz(p);
    seed.objective = objective(seed.ansatz, input, tol);
    const auto refined = refine(seed, input, cfg);
    CHECK(refined.objective <= seed.objective);
    CHECK(refined.ansatz.Ebar ==
          doctest::Approx(seed.ansatz.Ebar).epsilon(1e-8));
    CHECK(refined.ansatz.beta == doctest::Approx(seed.ansatz.beta).epsilon(1e-8));
}

TEST_CASE("refine honors skip_refine") {
    const auto input = small_lorentz_input();
    auto cfg = small_config(input);
    cfg.skip_refine = true;
    FitResult seed;
    seed.ansatz = exact_ansatz(input.problem());
    seed.objective = 123.0;
    seed.grid_only = true;
    const auto out = refine(seed, input, cfg);
    CHECK(out.objective == 123.0);
    CHECK(out.grid_only);
}

TEST_CASE("full fit on an exact input recovers the true parameters") {
    const ModelProblem p;
    const auto input = small_lorentz_input();
    auto cfg = small_config(input);
    const auto result = fit(input, cfg);
    CHECK(result.converged);
    CHECK(result.chi_fit <= 1e-6);
    CHECK(std::abs(result.ansatz.Ebar / p.E0() - 1.0) < 1e-3);
    CHECK(std::abs(result.ansatz.beta / 5.0 - 1.0) < 1e-3);
    CHECK(std::abs(result.ansatz.roots[0] / (p.E0() / 7.0) - 1.0) < 1e-3);
    CHECK(count_sign_changes(result.ansatz, 0.0,
                             std::numeric_limits<double>::infinity()) == 1);
    // stored chi_fit must equal the metrics recomputation
    const double tol = effective_quad_tol(input, cfg);
    const double recomputed =
        chi_fit(input.phi, model_phi(result.ansatz, input, tol));
    CHECK(result.chi_fit == doctest::Approx(recomputed).epsilon(1e-12));
    // objective of the refined result does not exceed the grid seed
    const auto seeds = grid_scan(input, cfg);
    CHECK(result.objective <= seeds.front().objective);
}

TEST_CASE("fit without the sum rule recovers the amplitude by least squares") {
    const ModelProblem p;
    const auto input = small_lorentz_input();
    auto cfg = small_config(input);
    cfg.sum_rule_active = false;
    cfg.levels = 2;
    const auto result = fit(input, cfg);
    CHECK(result.chi_fit <= 1e-4);
    const double c_exact = exact_ansatz(p).C;
    CHECK(std::abs(result.ansatz.C / c_exact - 1.0) < 1e-2);
}

TEST_CASE("nested-beta scan resolves the thin Laplace valley") {
    const ModelProblem p;
    const auto input = exact_input(p, KernelSpec::laplace(1.9304, 40));
    ScanConfig cfg;
    cfg.sum_rule_active = true;
    cfg.sum_rule_value = input.sum_rule;
    cfg.skip_refine = true;
    cfg.levels = 3;
    cfg.ebar_points = 60;
    cfg.beta_inner_levels = 4;
    const auto result = fit(input, cfg);
    CHECK(result.grid_only);
    CHECK(std::abs(result.ansatz.Ebar / p.E0() - 1.0) < 1e-2);
    CHECK(std::abs(result.ansatz.beta / 5.0 - 1.0) < 1e-2);
    CHECK(result.chi_fit < 1e-3);
}

TEST_CASE("top_k returns that many seeds, best first") {
    const auto input = small_lorentz_input();
    auto cfg = small_config(input);
    cfg.levels = 1;
    cfg.ebar_points = 8;
    cfg.beta_points = 8;
    cfg.top_k = 3;
    const auto seeds = grid_scan(input, cfg);
    REQUIRE(seeds.size() == 3);
    CHECK(seeds[0].objective <= seeds[1].objective);
    CHECK(seeds[1].objective <= seeds[2].objective);
}

TEST_CASE("the boundedness guard prunes grid cells") {
    const auto input = small_lorentz_input();
    auto cfg = small_config(input);
    cfg.levels = 1;
    cfg.ebar_points = 6;
    cfg.beta_points = 6;
    // far below any reachable |f| maximum: every cell is rejected
    cfg.fprime_cap = 1e-12;
    CHECK_THROWS_AS((void)grid_scan(input, cfg), std::runtime_error);
    // far above: identical to the guard being off
    cfg.fprime_cap = 1e9;
    const auto capped = grid_scan(input, cfg);
    cfg.fprime_cap = 0.0;
    const auto plain = grid_scan(input, cfg);
    CHECK(capped.front().objective == plain.front().objective);
}

TEST_CASE("scan results are independent of the worker count") {
    const auto input = small_lorentz_input();
    auto cfg = small_config(input);
    cfg.levels = 2;
    cfg.threads = 1;
    const auto one = grid_scan(input, cfg);
    cfg.threads = 2;
    const auto two = grid_scan(input, cfg);
    CHECK(one.front().objective == two.front().objective);
    CHECK(one.front().ansatz.Ebar == two.front().ansatz.Ebar);
    CHECK(one.front().ansatz.C == two.front().ansatz.C);
    REQUIRE(one.front().scan_trace.size() == two.front().scan_trace.size());
    for (std::size_t i = 0; i < one.front().scan_trace.size(); ++i)
        CHECK(one.front().scan_trace[i].objective ==
              two.front().scan_trace[i].objective);
}

TEST_CASE("grid scan rejects nonsensical configurations") {
    const auto input = small_lorentz_input();
    auto cfg = small_config(input);
    cfg.ebar_points = 1;
    CHECK_THROWS_AS((void)grid_scan(input, cfg), std::invalid_argument);
    cfg = small_config(input);
    cfg.extrema = 0;
    CHECK_THROWS_AS((void)grid_scan(input, cfg), std::invalid_argument);
    cfg = small_config(input);
    cfg.beta_min = 1.0;  // below the N + nu + 1 floor with the sum rule on
    CHECK_THROWS_AS((void)grid_scan(input, cfg), std::invalid_argument);
}
