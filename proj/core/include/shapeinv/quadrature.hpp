#pragma once

#include <functional>
#include <span>
#include <vector>

namespace shapeinv {

struct QuadratureResult {
    double value = 0.0;
    double error_estimate = 0.0;
    bool converged = true;
    long evaluations = 0;

    double require() const;  // value, or throws if not converged
};

/// Adaptive Gauss-Kronrod (7,15) integration of f over the finite interval [a,b].
/// Deterministic: fixed bisection order, tolerance halved per level.
QuadratureResult integrate_adaptive(const std::function<double(double)>& f,
                                    double a, double b, double abs_tol,
                                    int max_depth = 48);

/// Description of a semi-infinite integration domain [lower, inf).
///
/// threshold_exponent p describes the integrand behavior ~ (E-lower)^(p-1)
/// near the lower end; p = 1 means regular, p = 1/2 means an integrable
/// inverse-square-root singularity. The first panel is integrated in a
/// substituted variable that removes the singularity (E = lower + t^2 for
/// half-integer p), so the integrand is never evaluated at E = lower.
/// The tail beyond tail_start is mapped via E = tail_start + L*u/(1-u).
struct SemiInfiniteDomain {
    double lower = 0.0;
    double threshold_exponent = 1.0;
    std::vector<double> splits;     // interior breakpoints, any order
    double tail_scale = 1.0;        // L in the tail map, > 0
    double tail_start = 0.0;        // 0 -> max(lower + 4*tail_scale, splits)
};

QuadratureResult integrate_semi_infinite(const std::function<double(double)>& f,
                                         const SemiInfiniteDomain& dom,
                                         double abs_tol, int max_depth = 48);

/// Convenience overload matching the common call pattern: integrand with an
/// endpoint singularity no worse than (E-singular_at)^(-1/2).
QuadratureResult integrate_semi_infinite(const std::function<double(double)>& f,
                                         double singular_at,
                                         std::span<const double> split_points,
                                         double tail_scale, double abs_tol);

/// Result of integrating an m-component integrand over a shared subdivision.
struct VectorQuadratureResult {
    std::vector<double> values;
    std::vector<double> errors;
    bool converged = true;
    long evaluations = 0;
};

/// Integrates f(E, out[0..m)) over [lower, inf) with the subdivision refined
/// until every component meets abs_tol. Components share evaluation points,
/// which makes curves over a sigma grid much cheaper than m scalar passes.
VectorQuadratureResult integrate_semi_infinite_vector(
    const std::function<void(double, double*)>& f, int m,
    const SemiInfiniteDomain& dom, double abs_tol, int max_depth = 48);

/// Gauss-Laguerre rule in the numerically safe form: sum w_i h(x_i)
/// ~ integral_0^inf h(x) dx for integrands h(x) = p(x) exp(-x) with
/// polynomial p of degree <= 2n-1 (evaluate h with its exponential decay
/// included; the exp(x_i) factor lives in the weights). Nodes from
/// Golub-Welsch polished by Newton steps on the scaled recurrence.
struct GaussLaguerreRule {
    std::vector<double> nodes;
    std::vector<double> weights;
};
GaussLaguerreRule gauss_laguerre(int n);

}  // namespace shapeinv
