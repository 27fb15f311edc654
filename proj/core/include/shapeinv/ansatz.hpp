#pragma once

#include <cstddef>
#include <optional>
#include <vector>

namespace shapeinv {

/// Ansatz for the derivative of the solution:
///
///   f'(E) = C (E-E_thr)^(nu-1) prod_i (E-E_i) exp(gamma(E)) / (E/Ebar + 1)^beta
///
/// with gamma(E) a short expansion that vanishes at threshold and stays
/// finite at infinity. The number of roots fixes the number of maxima and
/// minima of the reconstructed f. Values are treated as immutable; the
/// constraint operations return modified copies.
struct ShapeAnsatz {
    double C = 1.0;
    std::vector<double> roots;          // {E_i}, MeV
    double Ebar = 1.0;                  // MeV, > 0
    double beta = 3.0;                  // tail exponent, > N + nu
    std::vector<double> gamma_coeffs;   // {c_k}, empty = gamma == 0
    double threshold_exponent = 0.5;    // nu
    double E_thr = 0.0;

    int extrema_count() const { return static_cast<int>(roots.size()); }

    /// Checks Ebar > 0, nu > 0, finite roots and beta > N + nu; with
    /// require_first_moment also beta > N + nu + 1 (needed once the
    /// sum rule is imposed). Throws std::invalid_argument.
    void validate(bool require_first_moment = false) const;

    double gamma(double E) const;
    double gamma_tail_limit() const;  // lim E->inf gamma(E)
    bool gamma_is_zero() const;
};

/// f'(E); throws std::domain_error for E <= E_thr (the default nu = 1/2
/// diverges integrably at threshold).
double eval_fprime(const ShapeAnsatz& a, double E);

/// f(E) = integral of f' from E_thr; f(E_thr) = 0 exactly.
double eval_f(const ShapeAnsatz& a, double E);

/// f on an ascending grid of energies, accumulated segment by segment.
std::vector<double> eval_f_grid(const ShapeAnsatz& a,
                                const std::vector<double>& energies);

/// Moment integral of the ansatz with C dropped:
///   integral E^p (E-E_thr)^(nu-1) prod_{i != deleted}(E-E_i) e^gamma
///           (E/Ebar+1)^(-beta) dE
/// over [E_thr, inf). Uses Beta-function closed forms when gamma == 0 and
/// nu is in {1/2, 1, 3/2}, otherwise adaptive quadrature.
double ansatz_moment(const ShapeAnsatz& a, int p,
                     std::optional<std::size_t> deleted_root = std::nullopt);

/// Replaces roots[which] by M1/M0 of the root-deleted integrand so that
/// integral f' dE = 0 exactly (the integral is linear in any single root).
ShapeAnsatz eliminate_root(const ShapeAnsatz& a, std::size_t which = 0);

/// Rescales C so that -integral E f'(E) dE = S.
ShapeAnsatz normalize_C(const ShapeAnsatz& a, double S);

/// Number of roots strictly inside (lo, hi); f' changes sign exactly there.
int count_sign_changes(const ShapeAnsatz& a, double lo, double hi);

}  // namespace shapeinv
