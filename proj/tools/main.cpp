// shapeinv: shape-constrained inversion of first-kind integral equations.
//
// Subcommands
//   generate-input   sample a transform of the built-in test problem
//   invert           run the shape-constrained inversion on an input file
//   baseline         run the basis-expansion comparison method
//   reproduce        run a bundled benchmark preset and verify its targets

#include "shapeinv/experiments.hpp"
#include "shapeinv/io.hpp"

#include <CLI11.hpp>
#include <json.hpp>

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <sstream>

namespace fs = std::filesystem;
using namespace shapeinv;

namespace {

struct GenerateOptions {
    std::string family = "lorentz";
    double sigma_i = 10.0;
    double sigma_min = -2.0;
    double sigma_max = 41.4;
    double s_max = -2.0;
    double span = 41.4;
    double z_max = 1.9304;
    int n = 100;
    bool exact = false;
    int galerkin = 0;
    double noise = -1.0;
    double basis_b = 0.3;
    double eta = 1.0;
    std::uint64_t seed = 1;
    std::string out = ".";
    std::string name = "input";
};

KernelSpec spec_from(const GenerateOptions& g) {
    const KernelFamily family = family_from_name(g.family);
    switch (family) {
        case KernelFamily::Lorentz:
            return KernelSpec::lorentz(g.sigma_i, g.sigma_min, g.sigma_max, g.n);
        case KernelFamily::Stieltjes:
            return KernelSpec::stieltjes(g.s_max, g.span, g.n);
        case KernelFamily::Laplace:
            return KernelSpec::laplace(g.z_max, g.n);
    }
    throw std::invalid_argument("unknown family");
}

int cmd_generate(const GenerateOptions& g) {
    const ModelProblem p{g.eta};
    const KernelSpec spec = spec_from(g);
    SampledInput input =
        g.galerkin > 0 ? galerkin_input(p, spec, g.galerkin, g.basis_b)
                       : exact_input(p, spec);
    if (g.noise >= 0.0) input = noisy_input(input, g.noise, g.seed);
    io::write_input(fs::path(g.out) / g.name, input);
    std::printf("wrote %s.csv (+.json): %s, %zu samples, provenance %s\n",
                (fs::path(g.out) / g.name).c_str(), family_name(spec.family),
                input.sigma.size(),
                input.provenance == Provenance::Exact      ? "exact"
                : input.provenance == Provenance::Galerkin ? "galerkin"
                                                           : "noisy");
    return 0;
}

struct InvertOptions {
    std::string input;
    std::string out = ".";
    std::string config;
    bool grid_only = false;
    bool no_sum_rule = false;
    bool m_sweep = false;
    int kgamma = -1;
    int levels = 0;
    int extrema = 0;
    int threads = 0;
};

void apply_config_file(ScanConfig& cfg, const std::string& path) {
    std::ifstream in(path);
    if (!in) throw std::runtime_error("cannot read config " + path);
    nlohmann::json j = nlohmann::json::parse(in);
    cfg.ebar_min = j.value("ebar_min", cfg.ebar_min);
    cfg.ebar_max = j.value("ebar_max", cfg.ebar_max);
    cfg.ebar_points = j.value("ebar_points", cfg.ebar_points);
    cfg.beta_min = j.value("beta_min", cfg.beta_min);
    cfg.beta_max = j.value("beta_max", cfg.beta_max);
    cfg.beta_points = j.value("beta_points", cfg.beta_points);
    cfg.levels = j.value("levels", cfg.levels);
    cfg.beta_inner_levels = j.value("beta_inner_levels", cfg.beta_inner_levels);
    cfg.top_k = j.value("k", j.value("top_k", cfg.top_k));
    cfg.skip_refine = j.value("skip_refine", cfg.skip_refine);
    if (j.contains("sum_rule")) {
        cfg.sum_rule_active = j["sum_rule"].value("active", cfg.sum_rule_active);
        cfg.sum_rule_value = j["sum_rule"].value("value", cfg.sum_rule_value);
    }
    cfg.extrema = j.value("N", cfg.extrema);
    cfg.k_gamma = j.value("K_gamma", cfg.k_gamma);
    cfg.threshold_exponent = j.value("nu", cfg.threshold_exponent);
    cfg.fprime_cap = j.value("fprime_cap", cfg.fprime_cap);
    cfg.quad_tol = j.value("quad_tol", cfg.quad_tol);
    cfg.threads = j.value("threads", cfg.threads);
}

void write_solution_csv(const fs::path& path, const SampledInput& input,
                        const ShapeAnsatz& a) {
    std::vector<double> energies(421);
    for (std::size_t i = 0; i < energies.size(); ++i)
        energies[i] = 42.0 * static_cast<double>(i) / (energies.size() - 1);
    const auto f_appr = eval_f_grid(a, energies);
    const ModelProblem p = input.problem();
    std::vector<double> f_true(energies.size());
    for (std::size_t i = 0; i < energies.size(); ++i)
        f_true[i] = exact_f(p, energies[i]);
    io::write_table_csv(path, {"E", "f_appr", "f_true"},
                        {energies, f_appr, f_true});
}

int cmd_invert(const InvertOptions& opt) {
    if (!fs::exists(opt.input + ".csv") || !fs::exists(opt.input + ".json")) {
        std::fprintf(stderr, "invert: input not found: %s.csv/.json\n",
                     opt.input.c_str());
        return 2;
    }
    const SampledInput input = io::read_input(opt.input);
    ScanConfig cfg = experiments::default_config(input, opt.threads);
    if (!opt.config.empty()) apply_config_file(cfg, opt.config);
    if (opt.grid_only) cfg.skip_refine = true;
    if (opt.no_sum_rule) cfg.sum_rule_active = false;
    if (opt.kgamma >= 0) cfg.k_gamma = opt.kgamma;
    if (opt.levels > 0) cfg.levels = opt.levels;
    if (opt.extrema > 0) cfg.extrema = opt.extrema;
    if (opt.threads > 0) cfg.threads = opt.threads;

    const auto result = experiments::run_shape_case("invert", input, cfg);
    const fs::path out(opt.out);
    io::write_fit_result(out / "fit.json", result.fit);
    io::write_chi_report(out / "chi.json", result.chi);
    write_solution_csv(out / "solution.csv", input, result.fit.ansatz);
    std::printf("chi_input %.6e  chi_fit %.6e  chi_solution %.6e\n",
                result.chi.chi_input, result.chi.chi_fit,
                result.chi.chi_solution);

    if (opt.m_sweep) {
        nlohmann::json sweep = nlohmann::json::array();
        for (int kg : {0, 1, 2, 4}) {
            ScanConfig c2 = cfg;
            c2.k_gamma = kg;
            const auto r2 = experiments::run_shape_case("m-sweep", input, c2);
            sweep.push_back({{"M", 2 + kg},
                             {"K_gamma", kg},
                             {"chi_fit", r2.chi.chi_fit},
                             {"chi_solution", r2.chi.chi_solution}});
            std::printf("M=%d  chi_fit %.6e  chi_solution %.6e\n", 2 + kg,
                        r2.chi.chi_fit, r2.chi.chi_solution);
        }
        std::ofstream ms(out / "msweep.json");
        ms << sweep.dump(2) << '\n';
    }
    return result.fit.converged ? 0 : 3;
}

struct BaselineOptions {
    std::string input;
    std::string out = ".";
    std::string n_list = "5,8,9,10";
    double alpha_min = 0.01;
    double alpha_max = 2.0;
    int alpha_points = 40;
    int threads = 0;
};

int cmd_baseline(const BaselineOptions& opt) {
    if (!fs::exists(opt.input + ".csv")) {
        std::fprintf(stderr, "baseline: input not found: %s.csv\n",
                     opt.input.c_str());
        return 2;
    }
    const SampledInput input = io::read_input(opt.input);
    std::vector<int> n_list;
    {
        std::string item;
        std::stringstream ss(opt.n_list);
        while (std::getline(ss, item, ',')) n_list.push_back(std::stoi(item));
    }
    std::vector<double> alphas(opt.alpha_points);
    const double r = std::log(opt.alpha_max / opt.alpha_min) /
                     std::max(opt.alpha_points - 1, 1);
    for (int i = 0; i < opt.alpha_points; ++i)
        alphas[i] = opt.alpha_min * std::exp(r * i);

    const int n_max = *std::max_element(n_list.begin(), n_list.end());
    const auto table =
        precompute_basis_transforms(input, n_max, alphas, opt.threads);
    const ModelProblem p = input.problem();
    std::vector<double> col_n, col_alpha, col_fit, col_sol;
    for (int N : n_list) {
        const auto e = fit_standard(input, N, table);
        const double sol = chi_solution(
            [&](double E) { return exact_f(p, E); },
            [&](double E) { return eval_expansion(e, E); });
        col_n.push_back(N);
        col_alpha.push_back(e.alpha);
        col_fit.push_back(e.chi_fit);
        col_sol.push_back(sol);
        std::printf("N=%-3d alpha %.4g  chi_fit %.6e  chi_solution %.6e\n", N,
                    e.alpha, e.chi_fit, sol);
    }
    io::write_table_csv(fs::path(opt.out) / "baseline.csv",
                        {"N", "alpha", "chi_fit", "chi_solution"},
                        {col_n, col_alpha, col_fit, col_sol});
    return 0;
}

void write_comparison(const fs::path& path,
                      const std::vector<experiments::Check>& checks) {
    std::ofstream out(path);
    out << "check,computed,reference,bound_lo,bound_hi,verdict\n";
    for (const auto& c : checks) {
        char buf[256];
        std::snprintf(buf, sizeof buf, "%s,%.10e,%.10e,%.10e,%.10e,%s\n",
                      c.name.c_str(), c.computed, c.reference, c.bound_lo,
                      c.bound_hi,
                      c.informational ? "info" : (c.pass ? "pass" : "FAIL"));
        out << buf;
    }
}

void print_checks(const experiments::Suite& suite) {
    std::printf("== %s ==\n", suite.name.c_str());
    for (const auto& c : suite.checks) {
        if (c.informational)
            std::printf("  [info] %-42s computed %.4e  (reference %.4e)\n",
                        c.name.c_str(), c.computed, c.reference);
        else
            std::printf("  [%s] %-42s computed %.4e  (reference %.4e, window "
                        "[%.3e, %.3e])\n",
                        c.pass ? "pass" : "FAIL", c.name.c_str(), c.computed,
                        c.reference, c.bound_lo, c.bound_hi);
    }
}

void write_suite_artifacts(const fs::path& dir, const experiments::Suite& s) {
    fs::create_directories(dir);
    write_comparison(dir / "comparison.csv", s.checks);
    if (!s.baseline.empty()) {
        std::vector<double> n, alpha, cf, cs;
        for (const auto& row : s.baseline) {
            n.push_back(row.N);
            alpha.push_back(row.alpha);
            cf.push_back(row.chi_fit);
            cs.push_back(row.chi_solution);
        }
        io::write_table_csv(dir / "baseline.csv",
                            {"N", "alpha", "chi_fit", "chi_solution"},
                            {n, alpha, cf, cs});
    }
    int idx = 0;
    for (const auto& c : s.cases) {
        const std::string stem = "case" + std::to_string(idx++);
        io::write_input(dir / stem, c.input);
        io::write_fit_result(dir / (stem + "_fit.json"), c.fit);
        io::write_chi_report(dir / (stem + "_chi.json"), c.chi);
        write_solution_csv(dir / (stem + "_solution.csv"), c.input,
                           c.fit.ansatz);
    }
}

int cmd_reproduce(const std::string& name, const std::string& out, int threads) {
    experiments::Suite suite;
    if (name == "table1") suite = experiments::run_table1(threads);
    else if (name == "table2") suite = experiments::run_table2(threads);
    else if (name == "table3") suite = experiments::run_table3(threads);
    else if (name == "fig1") suite = experiments::run_fig1(threads);
    else if (name == "stieltjes") suite = experiments::run_stieltjes_suite(threads);
    else if (name == "laplace") suite = experiments::run_laplace_suite(threads);
    else {
        std::fprintf(stderr, "unknown preset: %s\n", name.c_str());
        return 2;
    }
    print_checks(suite);
    const fs::path dir = fs::path(out) / suite.name;
    write_suite_artifacts(dir, suite);
    if (suite.name == "fig1" && !suite.cases.empty()) {
        // the three curves: input, exact solution, approximate solution
        const auto& c = suite.cases.front();
        io::write_curve_csv(dir / "input_curve.csv", "sigma", "phi",
                            c.input.sigma, c.input.phi);
        std::vector<double> energies(421), ft(421);
        for (std::size_t i = 0; i < energies.size(); ++i) {
            energies[i] = 42.0 * static_cast<double>(i) / (energies.size() - 1);
            ft[i] = exact_f(c.input.problem(), energies[i]);
        }
        io::write_curve_csv(dir / "exact_solution.csv", "E", "f", energies, ft);
        io::write_curve_csv(dir / "approximate_solution.csv", "E", "f", energies,
                            eval_f_grid(c.fit.ansatz, energies));
    }
    std::printf("%s: %s\n", suite.name.c_str(),
                suite.all_pass() ? "all checks passed" : "CHECKS FAILED");
    return suite.all_pass() ? 0 : 1;
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"shape-constrained inversion of first-kind integral equations"};
    app.require_subcommand(1);

    int threads = 0;
    app.add_option("--threads", threads, "worker thread cap (0 = hardware)");

    GenerateOptions gen;
    auto* cg = app.add_subcommand("generate-input",
                                  "sample a transform of the test problem");
    cg->add_option("--family", gen.family, "lorentz|stieltjes|laplace");
    cg->add_option("--sigma-i", gen.sigma_i, "Lorentz width (MeV)");
    cg->add_option("--sigma-min", gen.sigma_min, "Lorentz window start (MeV)");
    cg->add_option("--sigma-max", gen.sigma_max, "Lorentz window end (MeV)");
    cg->add_option("--s-max", gen.s_max, "Stieltjes window end (MeV, < 0)");
    cg->add_option("--span", gen.span, "Stieltjes window length (MeV)");
    cg->add_option("--z-max", gen.z_max, "Laplace window end (1/MeV)");
    cg->add_option("--n", gen.n, "number of samples");
    cg->add_flag("--exact", gen.exact, "exact transform (default)");
    cg->add_option("--galerkin", gen.galerkin, "basis-truncated input, N0 terms");
    cg->add_option("--noise", gen.noise, "multiplicative Gaussian noise level");
    cg->add_option("--basis-b", gen.basis_b, "basis length scale (fm)");
    cg->add_option("--eta", gen.eta, "source range parameter (1/fm)");
    cg->add_option("--seed", gen.seed, "noise seed");
    cg->add_option("--out", gen.out, "output directory");
    cg->add_option("--name", gen.name, "output base name");

    InvertOptions inv;
    auto* ci = app.add_subcommand("invert", "shape-constrained inversion");
    ci->add_option("--input", inv.input, "input base path (without extension)")
        ->required();
    ci->add_option("--out", inv.out, "output directory");
    ci->add_option("--config", inv.config, "JSON scan configuration");
    ci->add_flag("--grid-only", inv.grid_only, "skip the local refinement");
    ci->add_flag("--no-sum-rule", inv.no_sum_rule,
                 "fit the amplitude instead of imposing the sum rule");
    ci->add_flag("--m-sweep", inv.m_sweep,
                 "report chi_fit for M = 2, 3, 4, 6 free parameters");
    ci->add_option("--kgamma", inv.kgamma, "gamma expansion terms");
    ci->add_option("--levels", inv.levels, "grid refinement levels");
    ci->add_option("--extrema", inv.extrema, "number of maxima and minima");

    BaselineOptions bas;
    auto* cb = app.add_subcommand("baseline", "basis-expansion comparison method");
    cb->add_option("--input", bas.input, "input base path")->required();
    cb->add_option("--out", bas.out, "output directory");
    cb->add_option("--n-list", bas.n_list, "comma-separated basis sizes");
    cb->add_option("--alpha-min", bas.alpha_min, "alpha grid start (1/MeV)");
    cb->add_option("--alpha-max", bas.alpha_max, "alpha grid end (1/MeV)");
    cb->add_option("--alpha-points", bas.alpha_points, "alpha grid size");

    std::string preset, rep_out = ".";
    auto* cr = app.add_subcommand("reproduce", "run a bundled benchmark preset");
    cr->add_option("name", preset,
                   "table1|table2|table3|fig1|stieltjes|laplace")
        ->required();
    cr->add_option("--out", rep_out, "output directory");

    CLI11_PARSE(app, argc, argv);

    try {
        if (cg->parsed()) return cmd_generate(gen);
        if (ci->parsed()) {
            inv.threads = threads;
            return cmd_invert(inv);
        }
        if (cb->parsed()) {
            bas.threads = threads;
            return cmd_baseline(bas);
        }
        if (cr->parsed()) return cmd_reproduce(preset, rep_out, threads);
    } catch (const std::exception& e) {
        std::fprintf(stderr, "error: %s\n", e.what());
        return 1;
    }
    return 0;
}
