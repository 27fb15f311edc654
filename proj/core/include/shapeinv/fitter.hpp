#pragma once

#include "shapeinv/ansatz.hpp"
#include "shapeinv/model_problem.hpp"

#include <vector>

namespace shapeinv {

/// Controls for the nested grid scan and the local refinement.
/// Zeros mean "derive a default from the input".
struct ScanConfig {
    double ebar_min = 0.0;   // 0 -> sigma-span/32-like lower bound
    double ebar_max = 0.0;
    int ebar_points = 20;
    double beta_min = 0.0;   // 0 -> N + nu + 1.25
    double beta_max = 14.0;
    int beta_points = 20;
    int levels = 3;          // nested grids, each ~10x finer
    // 1 = plain 2D grid; > 1 = a nested 1D beta grid is resolved inside every
    // Ebar point (the outer levels then refine Ebar only). Needed where the
    // objective valley is too thin in beta for the 2D grid to see, as in the
    // grid-only Laplace runs.
    int beta_inner_levels = 1;
    int top_k = 1;
    bool skip_refine = false;
    bool sum_rule_active = true;
    double sum_rule_value = 0.25;
    int extrema = 1;               // N
    int k_gamma = 0;               // number of gamma coefficients
    double threshold_exponent = 0.5;
    double E_thr = 0.0;
    double fprime_cap = 0.0;       // > 0 rejects grid cells with max|f| above it
    double quad_tol = 0.0;         // 0 -> 1e-11 * sum-rule scale
    int threads = 0;               // 0 -> hardware concurrency
    int max_refine_iterations = 200;
};

struct FitResult {
    ShapeAnsatz ansatz;
    double objective = 0.0;
    double chi_fit = 0.0;
    std::vector<double> residuals;   // relative residuals per sample
    struct TracePoint {
        double ebar, beta, objective;
    };
    std::vector<TracePoint> scan_trace;
    bool converged = false;
    bool grid_only = false;
};

/// Weighted least-squares objective sum w_i (phi_i - model_i)^2 with the
/// model in Phi units (the Laplace f'-side transform is divided by z; its
/// z = 0 sample contributes a zero residual by construction). The ansatz
/// must already satisfy the normalization constraint (and the sum rule
/// when active).
double objective(const ShapeAnsatz& a, const SampledInput& input,
                 double quad_tol);

/// Model transform in Phi units on the input grid (Laplace values divided by
/// z, the z = 0 entry defined to produce a zero residual).
std::vector<double> model_phi(const ShapeAnsatz& a, const SampledInput& input,
                              double quad_tol);

/// Relative residuals (phi - model)/phi matching chi_fit.
std::vector<double> fit_residuals(const ShapeAnsatz& a,
                                  const SampledInput& input, double quad_tol);

/// Nested (Ebar, beta) grid scan with gamma == 0 and both constraints
/// eliminated per cell; returns the best seeds sorted by objective with
/// deterministic tie-breaking (smaller Ebar, then smaller beta).
std::vector<FitResult> grid_scan(const SampledInput& input,
                                 const ScanConfig& config);

/// Local minimization over the free parameters starting from a seed
/// (Polak-Ribiere conjugate gradient, finite-difference gradients). Never
/// returns a result worse than the seed.
FitResult refine(const FitResult& seed, const SampledInput& input,
                 const ScanConfig& config);

/// grid_scan + refine of the top seeds; picks the best final result and
/// fills residuals and chi_fit.
FitResult fit(const SampledInput& input, const ScanConfig& config);

/// Default per-point quadrature tolerance for a config (1e-11 * sum-rule
/// scale unless overridden).
double effective_quad_tol(const SampledInput& input, const ScanConfig& config);

}  // namespace shapeinv
