#include "shapeinv/metrics.hpp"
#include "shapeinv/model_problem.hpp"

#include <doctest.h>

#include <stdexcept>

#include <cmath>
#include <vector>

using namespace shapeinv;

TEST_CASE("chi_solution basics") {
    auto f = [](double E) { return E * std::exp(-E); };
    auto same = f;
    CHECK(chi_solution(f, same) == 0.0);
    auto scaled = [&](double E) { return 1.01 * f(E); };
    CHECK(chi_solution(f, scaled) == doctest::Approx(0.01).epsilon(1e-12));
}

TEST_CASE("chi_solution excludes the left endpoint") {
    const ModelProblem p;
    auto f_true = [&](double E) { return exact_f(p, E); };
    // f_true(0) = 0 would divide by zero if sampled; the grid starts above it
    CHECK_NOTHROW((void)chi_solution(f_true, f_true, 0.0, 42.0, 200));
}

TEST_CASE("chi_input and chi_fit point rules") {
    std::vector<double> a{1.0, 2.0, 4.0};
    CHECK(chi_input(a, a) == 0.0);
    CHECK(chi_fit(a, a) == 0.0);
    std::vector<double> b{1.01, 2.02, 4.04};  // model = 1.01 * phi
    CHECK(chi_fit(a, b) == doctest::Approx(0.01).epsilon(1e-10));
}

TEST_CASE("chi metrics are invariant under joint positive rescaling") {
    const ModelProblem p;
    std::vector<double> x{0.7, 1.3, 2.9, 8.0}, y{0.72, 1.28, 3.0, 7.7};
    const double base = chi_input(x, y);
    std::vector<double> xs = x, ys = y;
    for (auto& v : xs) v *= 37.5;
    for (auto& v : ys) v *= 37.5;
    CHECK(chi_input(xs, ys) == doctest::Approx(base).epsilon(1e-14));

    auto f = [&](double E) { return exact_f(p, E); };
    auto g = [&](double E) { return exact_f(p, E) * (1.0 + 0.02 * std::sin(E)); };
    auto fs = [&](double E) { return 3.0 * f(E); };
    auto gs = [&](double E) { return 3.0 * g(E); };
    CHECK(chi_solution(f, g) ==
          doctest::Approx(chi_solution(fs, gs)).epsilon(1e-13));
}

TEST_CASE("deviation profile localizes a narrow bump") {
    auto f_true = [](double E) { return std::exp(-E / 10.0); };
    auto f_same = f_true;
    for (const auto& w : deviation_profile(f_true, f_same, 0.0, 10.0, 1.0))
        CHECK(w.abs_integral < 1e-13);

    // add a bump of area 0.05 centered at E = 4.5, narrow enough that its
    // mass sits inside one window
    const double area = 0.05, center = 4.5, width = 0.07;
    auto f_bump = [&](double E) {
        const double u = (E - center) / width;
        return f_true(E) +
               area / (width * std::sqrt(2.0 * M_PI)) * std::exp(-0.5 * u * u);
    };
    const auto windows = deviation_profile(f_true, f_bump, 0.0, 10.0, 1.0);
    for (const auto& w : windows) {
        if (w.lo <= center && center < w.hi)
            CHECK(w.abs_integral == doctest::Approx(area).epsilon(1e-4));
        else if (std::abs(w.lo - center) > 1.0 && std::abs(w.hi - center) > 1.0)
            CHECK(w.abs_integral < 1e-6);
    }
}

TEST_CASE("metrics reject malformed arguments") {
    std::vector<double> a{1.0, 2.0}, b{1.0};
    CHECK_THROWS_AS((void)chi_input(a, b), std::invalid_argument);
    std::vector<double> z{1.0, 0.0};
    CHECK_THROWS_AS((void)chi_fit(z, a), std::runtime_error);
    auto f = [](double E) { return E; };
    CHECK_THROWS_AS((void)deviation_profile(f, f, 0.0, 1.0, 0.0),
                    std::invalid_argument);
    auto zero = [](double) { return 0.0; };
    CHECK_THROWS_AS((void)chi_solution(zero, zero), std::runtime_error);
}
