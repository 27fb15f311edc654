#include "shapeinv/experiments.hpp"

#include "shapeinv/forward_map.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <stdexcept>

namespace shapeinv::experiments {

Check Check::upper(std::string name, double computed, double reference,
                   double bound) {
    Check c;
    c.name = std::move(name);
    c.computed = computed;
    c.reference = reference;
    c.bound_lo = 0.0;
    c.bound_hi = bound;
    c.pass = computed >= c.bound_lo && computed <= c.bound_hi;
    return c;
}

Check Check::window(std::string name, double computed, double reference,
                    double lo, double hi) {
    Check c;
    c.name = std::move(name);
    c.computed = computed;
    c.reference = reference;
    c.bound_lo = lo;
    c.bound_hi = hi;
    c.pass = computed >= lo && computed <= hi;
    return c;
}

Check Check::info(std::string name, double computed, double reference) {
    Check c;
    c.name = std::move(name);
    c.computed = computed;
    c.reference = reference;
    c.informational = true;
    c.pass = true;
    return c;
}

bool Suite::all_pass() const {
    return std::all_of(checks.begin(), checks.end(),
                       [](const Check& c) { return c.pass; });
}

ScanConfig default_config(const SampledInput& input, int threads) {
    ScanConfig cfg;
    cfg.sum_rule_active = true;
    cfg.sum_rule_value = input.sum_rule;
    cfg.threads = threads;
    if (input.kernel.family == KernelFamily::Laplace) {
        // grid minimization only; the relative norm makes the valley in
        // (Ebar, beta) too thin for a coarse 2D grid, so beta is resolved by
        // a nested 1D grid inside every Ebar point
        cfg.skip_refine = true;
        cfg.levels = 5;
        cfg.ebar_points = 60;
        cfg.beta_inner_levels = 5;
    }
    return cfg;
}

namespace {

ChiReport make_report(const SampledInput& input, const FitResult& fit,
                      const std::vector<double>* phi_exact) {
    ChiReport rep;
    rep.n1 = 200;
    rep.n2 = static_cast<int>(input.sigma.size());
    rep.e_min = 0.0;
    rep.e_max = 42.0;
    rep.chi_fit = fit.chi_fit;
    if (phi_exact) rep.chi_input = chi_input(*phi_exact, input.phi);

    const ModelProblem p = input.problem();
    std::vector<double> energies(rep.n1);
    for (int j = 1; j <= rep.n1; ++j)
        energies[j - 1] = rep.e_min + (rep.e_max - rep.e_min) * j / rep.n1;
    const auto f_appr = eval_f_grid(fit.ansatz, energies);
    double s = 0.0;
    for (int j = 0; j < rep.n1; ++j) {
        const double ft = exact_f(p, energies[j]);
        const double r = (ft - f_appr[j]) / ft;
        s += r * r;
    }
    rep.chi_solution = std::sqrt(s / rep.n1);
    return rep;
}

}  // namespace

CaseResult run_shape_case(std::string name, const SampledInput& input,
                          const ScanConfig& config) {
    CaseResult r;
    r.name = std::move(name);
    r.input = input;
    r.fit = fit(input, config);
    std::optional<std::vector<double>> phi_exact;
    if (input.provenance != Provenance::Exact)
        phi_exact = exact_input(input.problem(), input.kernel).phi;
    r.chi = make_report(input, r.fit, phi_exact ? &*phi_exact : nullptr);
    return r;
}

SampledInput make_lorentz_input(double sigma_I, int N0) {
    const ModelProblem p;
    const auto spec = KernelSpec::lorentz(sigma_I);
    return N0 > 0 ? galerkin_input(p, spec, N0) : exact_input(p, spec);
}

SampledInput make_stieltjes_input(double s_max, int N0) {
    const ModelProblem p;
    const auto spec = KernelSpec::stieltjes(s_max);
    return N0 > 0 ? galerkin_input(p, spec, N0) : exact_input(p, spec);
}

SampledInput make_laplace_input(double tau, std::uint64_t seed) {
    const ModelProblem p;
    const auto spec = KernelSpec::laplace();
    auto in = exact_input(p, spec);
    return tau > 0.0 ? noisy_input(in, tau, seed) : in;
}

CaseResult run_lorentz_case(double sigma_I, int N0, int threads) {
    auto input = make_lorentz_input(sigma_I, N0);
    auto cfg = default_config(input, threads);
    std::string name = "lorentz sigma_I=" + std::to_string(sigma_I);
    if (N0 > 0) name += " N0=" + std::to_string(N0);
    return run_shape_case(std::move(name), input, cfg);
}

CaseResult run_stieltjes_case(double s_max, int N0, int threads) {
    auto input = make_stieltjes_input(s_max, N0);
    auto cfg = default_config(input, threads);
    std::string name = "stieltjes s_max=" + std::to_string(s_max);
    if (N0 > 0) name += " N0=" + std::to_string(N0);
    return run_shape_case(std::move(name), input, cfg);
}

CaseResult run_laplace_case(double tau, std::uint64_t seed, int threads) {
    auto input = make_laplace_input(tau, seed);
    auto cfg = default_config(input, threads);
    std::string name = tau > 0.0
                           ? "laplace tau=" + std::to_string(tau) +
                                 " seed=" + std::to_string(seed)
                           : "laplace exact";
    return run_shape_case(std::move(name), input, cfg);
}

std::vector<BaselineRow> run_standard_sweep(const SampledInput& input,
                                            const std::vector<int>& n_list,
                                            int threads) {
    if (n_list.empty()) return {};
    const int n_max = *std::max_element(n_list.begin(), n_list.end());
    const auto alphas = default_alpha_grid();
    const auto table = precompute_basis_transforms(input, n_max, alphas, threads);
    const ModelProblem p = input.problem();
    std::vector<BaselineRow> rows;
    for (int N : n_list) {
        const auto e = fit_standard(input, N, table);
        BaselineRow row;
        row.N = N;
        row.alpha = e.alpha;
        row.chi_fit = e.chi_fit;
        row.chi_solution = chi_solution(
            [&](double E) { return exact_f(p, E); },
            [&](double E) { return eval_expansion(e, E); });
        rows.push_back(row);
    }
    return rows;
}

// ---------------------------------------------------------------------------
// named suites with embedded reference values and acceptance windows
// ---------------------------------------------------------------------------

Suite run_table2(int threads) {
    Suite s;
    s.name = "table2";
    const ModelProblem p;
    const double e0 = p.E0();
    struct Row {
        double sigma_I, ref_fit, ref_sol;
    };
    const Row rows[] = {{2.0, 1.4e-7, 1.6e-8},
                        {10.0, 1.45e-7, 2.1e-8},
                        {100.0, 7.5e-8, 3.3e-7}};
    for (const auto& row : rows) {
        auto c = run_lorentz_case(row.sigma_I, 0, threads);
        const std::string tag = "sigma_I=" + std::to_string(int(row.sigma_I));
        s.checks.push_back(Check::upper("chi_fit " + tag, c.chi.chi_fit,
                                        row.ref_fit, 1e-6));
        s.checks.push_back(Check::upper("chi_solution " + tag,
                                        c.chi.chi_solution, row.ref_sol, 1e-6));
        const auto& a = c.fit.ansatz;
        s.checks.push_back(Check::upper("Ebar rel err " + tag,
                                        std::abs(a.Ebar / e0 - 1.0), 0.0, 1e-3));
        s.checks.push_back(Check::upper("beta rel err " + tag,
                                        std::abs(a.beta / 5.0 - 1.0), 0.0, 1e-3));
        s.checks.push_back(
            Check::upper("E1 rel err " + tag,
                         std::abs(a.roots.at(0) / (e0 / 7.0) - 1.0), 0.0, 1e-3));
        s.cases.push_back(std::move(c));
    }
    return s;
}

Suite run_table1(int threads) {
    Suite s;
    s.name = "table1";
    auto input = make_lorentz_input(10.0, 0);
    s.baseline = run_standard_sweep(input, {5, 8, 9, 10}, threads);
    const double refs_fit[] = {8.3e-4, 2.3e-5, 6.2e-6, 4.1e-6};
    const double refs_sol[] = {5.2e-2, 1.4e-2, 1.3e-2, 2.65e-2};
    double best = std::numeric_limits<double>::infinity();
    int best_n = 0;
    for (std::size_t i = 0; i < s.baseline.size(); ++i) {
        const auto& row = s.baseline[i];
        s.checks.push_back(Check::info("chi_fit N=" + std::to_string(row.N),
                                       row.chi_fit, refs_fit[i]));
        s.checks.push_back(Check::info("chi_solution N=" + std::to_string(row.N),
                                       row.chi_solution, refs_sol[i]));
        if (row.chi_solution < best) {
            best = row.chi_solution;
            best_n = row.N;
        }
    }
    s.checks.push_back(Check::window("min chi_solution", best, 1.3e-2, 5e-3, 5e-2));
    s.checks.push_back(
        Check::window("argmin N", best_n, 9.0, 0.0, 9.0));  // attained below 10
    const double sol9 = s.baseline[2].chi_solution;
    const double sol10 = s.baseline[3].chi_solution;
    s.checks.push_back(Check::window("chi_solution(10)/chi_solution(9)",
                                     sol10 / sol9, 2.65e-2 / 1.3e-2,
                                     std::nextafter(1.0, 2.0),
                                     std::numeric_limits<double>::infinity()));
    return s;
}

Suite run_table3(int threads) {
    Suite s;
    s.name = "table3";
    auto input = make_lorentz_input(10.0, 10);
    s.baseline = run_standard_sweep(input, {2, 3, 4, 5}, threads);
    const double refs_fit[] = {8.0e-2, 2.6e-2, 2.6e-2, 1.35e-2};
    const double refs_sol[] = {0.22, 0.12, 0.13, 0.71};
    double best = std::numeric_limits<double>::infinity();
    for (std::size_t i = 0; i < s.baseline.size(); ++i) {
        const auto& row = s.baseline[i];
        s.checks.push_back(Check::info("chi_fit N=" + std::to_string(row.N),
                                       row.chi_fit, refs_fit[i]));
        s.checks.push_back(Check::info("chi_solution N=" + std::to_string(row.N),
                                       row.chi_solution, refs_sol[i]));
        best = std::min(best, row.chi_solution);
    }
    s.checks.push_back(
        Check::window("best chi_solution", best, 0.12, 0.08,
                      std::numeric_limits<double>::infinity()));
    return s;
}

Suite run_fig1(int threads) {
    Suite s;
    s.name = "fig1";
    auto c = run_lorentz_case(100.0, 3, threads);
    const auto [mn, mx] =
        std::minmax_element(c.input.phi.begin(), c.input.phi.end());
    s.checks.push_back(Check::upper("input max/min - 1", *mx / *mn - 1.0,
                                    5.7e-2, 0.1));
    s.checks.push_back(Check::window("chi_input", c.chi.chi_input, 1.55e-3,
                                     1.55e-3 * 0.7, 1.55e-3 * 1.3));
    s.checks.push_back(
        Check::upper("chi_solution", c.chi.chi_solution, 7.7e-3, 2e-2));
    s.cases.push_back(std::move(c));
    return s;
}

Suite run_stieltjes_suite(int threads) {
    Suite s;
    s.name = "stieltjes";
    {
        auto c = run_stieltjes_case(-2.0, 0, threads);
        s.checks.push_back(
            Check::info("chi_fit exact s_max=-2", c.chi.chi_fit, 3.45e-12));
        s.checks.push_back(Check::upper("chi_solution exact s_max=-2",
                                        c.chi.chi_solution, 3.9e-11, 1e-8));
        s.cases.push_back(std::move(c));
    }
    {
        auto c = run_stieltjes_case(-2.0, 5, threads);
        s.checks.push_back(
            Check::info("chi_input N0=5 s_max=-2", c.chi.chi_input, 1.3e-2));
        s.checks.push_back(
            Check::info("chi_solution N0=5 s_max=-2", c.chi.chi_solution, 0.10));
        s.cases.push_back(std::move(c));
    }
    {
        auto c = run_stieltjes_case(-2.0, 7, threads);
        s.checks.push_back(Check::window("chi_input N0=7 s_max=-2",
                                         c.chi.chi_input, 2.2e-3, 2.2e-3 * 0.7,
                                         2.2e-3 * 1.3));
        s.checks.push_back(Check::upper("chi_solution N0=7 s_max=-2",
                                        c.chi.chi_solution, 1.5e-2, 5e-2));
        s.cases.push_back(std::move(c));
    }
    {
        auto c = run_stieltjes_case(-20.0, 10, threads);
        s.checks.push_back(Check::upper("chi_solution N0=10 s_max=-20",
                                        c.chi.chi_solution, 1.0e-7, 1e-6));
        s.cases.push_back(std::move(c));
    }
    return s;
}

Suite run_laplace_suite(int threads) {
    Suite s;
    s.name = "laplace";
    {
        auto c = run_laplace_case(0.0, 0, threads);
        s.checks.push_back(Check::info("chi_fit exact", c.chi.chi_fit, 2.6e-6));
        s.checks.push_back(
            Check::upper("chi_solution exact", c.chi.chi_solution, 8.0e-6, 1e-4));
        s.cases.push_back(std::move(c));
    }
    std::vector<double> sols, fits;
    for (std::uint64_t seed : kLaplaceSeeds) {
        auto c = run_laplace_case(kNoiseLevel, seed, threads);
        sols.push_back(c.chi.chi_solution);
        fits.push_back(c.chi.chi_fit);
        s.checks.push_back(Check::info(
            "chi_solution tau=0.05 seed=" + std::to_string(seed),
            c.chi.chi_solution, 8.9e-3));
        s.cases.push_back(std::move(c));
    }
    auto median = [](std::vector<double> v) {
        std::sort(v.begin(), v.end());
        return v[v.size() / 2];
    };
    s.checks.push_back(Check::upper("median chi_solution tau=0.05",
                                    median(sols), 8.9e-3, 3e-2));
    s.checks.push_back(Check::window("median chi_fit / tau",
                                     median(fits) / kNoiseLevel, 4.9e-2 / 5e-2,
                                     1.0 / 1.5, 1.5));
    return s;
}

}  // namespace shapeinv::experiments
