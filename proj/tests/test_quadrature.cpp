#include "shapeinv/model_problem.hpp"
#include "shapeinv/quadrature.hpp"

#include <doctest.h>

#include <cmath>
#include <numbers>
#include <stdexcept>

using namespace shapeinv;

TEST_CASE("adaptive integration on finite intervals") {
    auto sq = [](double x) { return x * x; };
    CHECK(integrate_adaptive(sq, 0.0, 1.0, 1e-14).require() ==
          doctest::Approx(1.0 / 3.0).epsilon(1e-14));
    CHECK(integrate_adaptive([](double x) { return std::sin(x); }, 0.0,
                             std::numbers::pi, 1e-13)
              .require() == doctest::Approx(2.0).epsilon(1e-13));
    CHECK(integrate_adaptive(sq, 2.0, 2.0, 1e-14).value == 0.0);
}

TEST_CASE("semi-infinite: exp(-E) integrates to 1") {
    SemiInfiniteDomain dom;
    dom.tail_scale = 1.0;
    auto r = integrate_semi_infinite([](double E) { return std::exp(-E); }, dom,
                                     1e-13);
    CHECK(r.converged);
    CHECK(r.value == doctest::Approx(1.0).epsilon(1e-12));
}

TEST_CASE("semi-infinite: E^(-1/2) exp(-E) integrates to sqrt(pi)") {
    auto g = [](double E) { return std::exp(-E) / std::sqrt(E); };
    auto r = integrate_semi_infinite(g, 0.0, {}, 1.0, 1e-11);
    CHECK(r.converged);
    CHECK(r.value ==
          doctest::Approx(std::sqrt(std::numbers::pi)).epsilon(1e-10));
}

TEST_CASE("semi-infinite: derivative of the exact solution integrates to 0") {
    const ModelProblem p;
    auto g = [&](double E) { return exact_fprime(p, E); };
    SemiInfiniteDomain dom;
    dom.threshold_exponent = 0.5;
    dom.splits = {p.E0() / 7.0};
    dom.tail_scale = p.E0();
    auto r = integrate_semi_infinite(g, dom, 1e-12);
    CHECK(r.converged);
    CHECK(std::abs(r.value) < 1e-10);
}

TEST_CASE("tolerance refinement changes values by less than the coarser bound") {
    const ModelProblem p;
    auto g = [&](double E) { return exact_f(p, E) * std::exp(-0.1 * E); };
    SemiInfiniteDomain dom;
    dom.threshold_exponent = 1.5;
    dom.tail_scale = p.E0();
    const double coarse_tol = 1e-8;
    auto coarse = integrate_semi_infinite(g, dom, coarse_tol);
    auto fine = integrate_semi_infinite(g, dom, coarse_tol / 10.0);
    CHECK(std::abs(coarse.value - fine.value) <= coarse_tol);
}

TEST_CASE("unresolvable integrand reports failure with an estimate") {
    auto g = [](double x) { return 1.0 / std::sqrt(std::abs(x - 0.37)); };
    auto r = integrate_adaptive(g, 0.0, 1.0, 1e-13, /*max_depth=*/4);
    CHECK_FALSE(r.converged);
    CHECK(r.error_estimate > 0.0);
    CHECK_THROWS_AS((void)r.require(), std::runtime_error);
}

TEST_CASE("vector integration matches scalar components") {
    const ModelProblem p;
    SemiInfiniteDomain dom;
    dom.threshold_exponent = 0.5;
    dom.splits = {p.E0() / 7.0};
    dom.tail_scale = p.E0();
    const double zs[3] = {0.1, 0.5, 1.5};
    auto vec = integrate_semi_infinite_vector(
        [&](double E, double* out) {
            const double fp = exact_fprime(p, E);
            for (int j = 0; j < 3; ++j) out[j] = std::exp(-zs[j] * E) * fp;
        },
        3, dom, 1e-13);
    CHECK(vec.converged);
    for (int j = 0; j < 3; ++j) {
        auto scal = integrate_semi_infinite(
            [&](double E) { return std::exp(-zs[j] * E) * exact_fprime(p, E); },
            dom, 1e-13)
                        .require();
        CHECK(vec.values[j] == doctest::Approx(scal).epsilon(1e-9));
    }
}

TEST_CASE("Gauss-Laguerre rule integrates x^k exp(-x) exactly") {
    const auto rule = gauss_laguerre(48);
    double factorial = 1.0;
    for (int k = 0; k <= 12; ++k) {
        if (k > 0) factorial *= k;
        double s = 0.0;
        for (std::size_t i = 0; i < rule.nodes.size(); ++i)
            s += rule.weights[i] * std::pow(rule.nodes[i], k) *
                 std::exp(-rule.nodes[i]);
        CHECK(s == doctest::Approx(factorial).epsilon(1e-12));
    }
    // high-degree products at a large rule stay finite and accurate
    const auto big = gauss_laguerre(248);
    double s = 0.0;
    for (std::size_t i = 0; i < big.nodes.size(); ++i)
        s += big.weights[i] * std::pow(big.nodes[i], 40) *
             std::exp(-big.nodes[i]);
    CHECK(s == doctest::Approx(std::exp(std::lgamma(41.0))).epsilon(1e-11));
}
