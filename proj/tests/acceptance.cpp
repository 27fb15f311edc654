// Acceptance suite: runs the full experiment matrix end to end and verifies
// every pinned target, printing one pass/fail line per criterion.

#include "shapeinv/experiments.hpp"
#include "shapeinv/forward_map.hpp"
#include "shapeinv/io.hpp"
#include "shapeinv/metrics.hpp"
#include "shapeinv/quadrature.hpp"

#include <chrono>
#include <cmath>
#include <cstdio>
#include <limits>
#include <string>
#include <vector>

using namespace shapeinv;
using namespace shapeinv::experiments;

namespace {

struct CriterionResult {
    int id;
    std::string title;
    bool pass = true;
    std::vector<std::string> details;

    void require(bool ok, const std::string& what) {
        if (!ok) {
            pass = false;
            details.push_back(what);
        }
    }
};

std::string fmt(const char* pattern, double a, double b = 0.0) {
    char buf[256];
    std::snprintf(buf, sizeof buf, pattern, a, b);
    return buf;
}

void absorb_checks(CriterionResult& crit, const Suite& suite,
                   bool (*select)(const Check&)) {
    for (const auto& c : suite.checks) {
        if (c.informational || !select(c)) continue;
        crit.require(c.pass, c.name + ": computed " + fmt("%.6e", c.computed) +
                                 " outside [" + fmt("%.3e", c.bound_lo) + ", " +
                                 fmt("%.3e", c.bound_hi) + "]");
    }
}

bool is_chi_check(const Check& c) { return c.name.rfind("chi", 0) == 0; }
bool is_param_check(const Check& c) { return !is_chi_check(c); }

}  // namespace

int main() {
    const int threads = 0;  // hardware concurrency
    std::vector<CriterionResult> criteria;
    std::vector<const FitResult*> all_fits;
    const ModelProblem problem;

    Suite table2, stj, lap;
    std::vector<CaseResult> lorentz_galerkin;

    const auto t_start = std::chrono::steady_clock::now();

    // ----- criteria 1 and 2: exact-input Lorentz inversions -----
    table2 = run_table2(threads);
    {
        CriterionResult c1{1,
                           "exact-input Lorentz inversion: chi_fit and "
                           "chi_solution <= 1e-6 for sigma_I in {2, 10, 100}"};
        absorb_checks(c1, table2, is_chi_check);
        criteria.push_back(std::move(c1));

        CriterionResult c2{2,
                           "parameter recovery: (Ebar, beta, E_1) -> "
                           "(20.7212603615, 5, E0/7) to 1e-3 relative"};
        absorb_checks(c2, table2, is_param_check);
        criteria.push_back(std::move(c2));
        for (const auto& cs : table2.cases) all_fits.push_back(&cs.fit);
    }

    // ----- criterion 3: basis-truncated Lorentz inversions -----
    {
        CriterionResult c3{3, "Galerkin-input Lorentz inversion accuracy"};
        struct Row {
            double sigma_I;
            int N0;
            double chi_input_lo, chi_input_hi;  // 0,0 = unchecked
            double chi_solution_cap;
        };
        const Row rows[] = {{10.0, 10, 2e-2, 4e-2, 5e-2},
                            {2.0, 60, 0.0, 0.0, 5e-3},
                            {100.0, 3, 0.0, 0.0, 2e-2},
                            {100.0, 10, 0.0, 0.0, 1e-4}};
        for (const auto& row : rows) {
            auto cs = run_lorentz_case(row.sigma_I, row.N0, threads);
            const std::string tag = "sigma_I=" + std::to_string(int(row.sigma_I)) +
                                    " N0=" + std::to_string(row.N0);
            if (row.chi_input_hi > 0.0)
                c3.require(cs.chi.chi_input >= row.chi_input_lo &&
                               cs.chi.chi_input <= row.chi_input_hi,
                           tag + ": chi_input " + fmt("%.4e", cs.chi.chi_input) +
                               " outside [" + fmt("%.1e", row.chi_input_lo) +
                               ", " + fmt("%.1e", row.chi_input_hi) + "]");
            c3.require(cs.chi.chi_solution <= row.chi_solution_cap,
                       tag + ": chi_solution " +
                           fmt("%.4e > cap %.1e", cs.chi.chi_solution,
                               row.chi_solution_cap));
            lorentz_galerkin.push_back(std::move(cs));
        }
        for (const auto& cs : lorentz_galerkin) all_fits.push_back(&cs.fit);
        criteria.push_back(std::move(c3));
    }

    // ----- criterion 4: standard-inversion instability on the exact input -----
    {
        CriterionResult c4{4,
                           "standard inversion, exact input sigma_I=10: "
                           "non-monotone instability in N"};
        Suite t1 = run_table1(threads);
        absorb_checks(c4, t1, [](const Check&) { return true; });
        criteria.push_back(std::move(c4));
    }

    // ----- criterion 5: standard inversion on the Galerkin input -----
    {
        CriterionResult c5{5,
                           "standard inversion, Galerkin input N0=10: best "
                           "chi_solution >= 0.08"};
        Suite t3 = run_table3(threads);
        absorb_checks(c5, t3, [](const Check&) { return true; });
        criteria.push_back(std::move(c5));
    }

    // ----- criterion 6: Stieltjes inversions -----
    {
        CriterionResult c6{6, "Stieltjes inversion accuracy"};
        stj = run_stieltjes_suite(threads);
        absorb_checks(c6, stj, [](const Check&) { return true; });
        for (const auto& cs : stj.cases) all_fits.push_back(&cs.fit);
        criteria.push_back(std::move(c6));
    }

    // ----- criterion 7: Laplace inversions -----
    {
        CriterionResult c7{7,
                           "Laplace inversion: exact grid-only and noisy-input "
                           "median accuracy"};
        lap = run_laplace_suite(threads);
        absorb_checks(c7, lap, [](const Check&) { return true; });
        for (const auto& cs : lap.cases) all_fits.push_back(&cs.fit);
        criteria.push_back(std::move(c7));
    }

    // ----- criterion 8: property suite -----
    {
        CriterionResult c8{8, "property suite"};

        // normalization and sum-rule residuals after the eliminations
        {
            ShapeAnsatz a;
            a.roots = {0.0};
            a.Ebar = 13.0;
            a.beta = 6.25;
            a = eliminate_root(a, 0);
            a = normalize_C(a, 0.25);
            SemiInfiniteDomain dom;
            dom.threshold_exponent = 0.5;
            dom.splits = a.roots;
            dom.tail_scale = a.Ebar;
            const double zero = integrate_semi_infinite(
                                    [&](double E) { return eval_fprime(a, E); },
                                    dom, 1e-14)
                                    .value;
            const double l1 = integrate_semi_infinite(
                                  [&](double E) {
                                      return std::abs(eval_fprime(a, E));
                                  },
                                  dom, 1e-14)
                                  .value;
            c8.require(std::abs(zero) < 1e-8 * l1,
                       "normalization residual " + fmt("%.2e", zero));
            const double first = -integrate_semi_infinite(
                                     [&](double E) {
                                         return E * eval_fprime(a, E);
                                     },
                                     dom, 1e-14)
                                     .value;
            c8.require(std::abs(first - 0.25) < 1e-8 * 0.25,
                       "sum-rule residual " + fmt("%.2e", first - 0.25));
        }

        // sum rule of the exact solution
        {
            SemiInfiniteDomain dom;
            dom.threshold_exponent = 1.5;
            dom.tail_scale = problem.E0();
            const double s = integrate_semi_infinite(
                                 [&](double E) { return exact_f(problem, E); },
                                 dom, 1e-13)
                                 .require();
            c8.require(std::abs(s - 0.25) < 1e-10,
                       "exact sum rule " + fmt("%.12e", s));
        }

        // Beta-identity oracle for the eliminated root at five beta values
        for (double beta : {3.0, 4.0, 5.0, 8.0, 12.0}) {
            ShapeAnsatz a;
            a.roots = {0.0};
            a.Ebar = problem.E0();
            a.beta = beta;
            const double from_impl = eliminate_root(a, 0).roots[0];
            SemiInfiniteDomain dom;
            dom.threshold_exponent = 0.5;
            dom.tail_scale = a.Ebar;
            auto env = [&](double E) {
                return std::pow(E, -0.5) * std::pow(E / a.Ebar + 1.0, -beta);
            };
            // moments are of order Ebar^(1/2..3/2); 1e-11 absolute leaves
            // plenty of room under the 1e-9 relative check
            const double m0 =
                integrate_semi_infinite(env, dom, 1e-11).require();
            const double m1 = integrate_semi_infinite(
                                  [&](double E) { return E * env(E); }, dom,
                                  1e-11)
                                  .require();
            c8.require(std::abs(from_impl / (m1 / m0) - 1.0) < 1e-9,
                       fmt("beta identity at beta=%.0f: rel err %.2e", beta,
                           std::abs(from_impl / (m1 / m0) - 1.0)));
        }

        // Laguerre orthonormality up to N0 = 60
        {
            const auto s = galerkin::overlap_matrix(60, 0.3);
            double worst = 0.0;
            for (int i = 0; i < 60; ++i)
                for (int j = 0; j < 60; ++j)
                    worst = std::max(worst,
                                     std::abs(s[std::size_t(i) * 60 + j] -
                                              (i == j ? 1.0 : 0.0)));
            c8.require(worst < 1e-10,
                       "orthonormality deviation " + fmt("%.2e", worst));
        }

        // integration-by-parts consistency of the forward map
        {
            const auto a = exact_ansatz(problem);
            const KernelSpec specs[] = {KernelSpec::lorentz(10.0, -2.0, 41.4, 7),
                                        KernelSpec::stieltjes(-2.0, 41.4, 7),
                                        KernelSpec::laplace(1.9304, 7)};
            for (const auto& spec : specs) {
                const auto grid = sigma_grid(spec);
                const auto lhs =
                    apply_ktilde_on(a, spec, grid, 1e-12 * 0.25);
                double worst = 0.0;
                for (std::size_t i = 0; i < grid.size(); ++i) {
                    const double s = grid[i];
                    SemiInfiniteDomain dom;
                    dom.threshold_exponent = 1.5;
                    dom.tail_scale = problem.E0();
                    if (spec.family == KernelFamily::Lorentz)
                        for (double d : {-50.0, -10.0, 10.0, 50.0})
                            if (s + d > 0.0) dom.splits.push_back(s + d);
                    double rhs = integrate_semi_infinite(
                                     [&](double E) {
                                         return kernel_K(spec, s, E) *
                                                eval_f(a, E);
                                     },
                                     dom, 1e-11 * 0.25)
                                     .value;
                    if (spec.family == KernelFamily::Laplace) rhs *= s;
                    const double scale = std::max(std::abs(rhs), 1e-4);
                    worst = std::max(worst, std::abs(lhs[i] - rhs) / scale);
                }
                c8.require(worst < 1e-8,
                           std::string("integration-by-parts mismatch ") +
                               family_name(spec.family) + " " +
                               fmt("%.2e", worst));
            }
        }

        // every produced fit respects the configured number of extrema
        for (const FitResult* f : all_fits)
            c8.require(count_sign_changes(
                           f->ansatz, f->ansatz.E_thr,
                           std::numeric_limits<double>::infinity()) == 1,
                       "sign-change count differs from configured N");

        // leftover deviations of the best exact-input fit are not broad:
        // every 1 MeV window integral stays below 1e-6 of the sum rule
        if (table2.cases.size() > 1) {
            const auto& fitted = table2.cases[1].fit.ansatz;  // sigma_I = 10
            const auto windows = deviation_profile(
                [&](double E) { return exact_f(problem, E); },
                [&](double E) { return eval_f(fitted, E); }, 0.0, 42.0, 1.0);
            double worst = 0.0;
            for (const auto& w : windows) worst = std::max(worst, w.abs_integral);
            c8.require(worst <= 1e-6 * problem.sum_rule(),
                       "deviation window integral " + fmt("%.2e", worst));
        }

        criteria.push_back(std::move(c8));
    }

    const auto t_end = std::chrono::steady_clock::now();
    const double elapsed =
        std::chrono::duration<double>(t_end - t_start).count();

    bool all_pass = true;
    for (const auto& c : criteria) {
        std::printf("criterion %d: %s — %s\n", c.id, c.pass ? "PASS" : "FAIL",
                    c.title.c_str());
        for (const auto& d : c.details) std::printf("    %s\n", d.c_str());
        all_pass = all_pass && c.pass;
    }
    std::printf("acceptance: %s (%.1f s)\n", all_pass ? "PASS" : "FAIL",
                elapsed);
    return all_pass ? 0 : 1;
}
