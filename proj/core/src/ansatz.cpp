#include "shapeinv/ansatz.hpp"

#include "shapeinv/quadrature.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

namespace shapeinv {

namespace {

bool is_half_integer_family(double nu) {
    return nu == 0.5 || nu == 1.0 || nu == 1.5;
}

double log_beta(double x, double y) {
    return std::lgamma(x) + std::lgamma(y) - std::lgamma(x + y);
}

// Coefficients of prod (x - r_i) in ascending powers of x.
std::vector<double> poly_from_roots(const std::vector<double>& roots) {
    std::vector<double> c{1.0};
    for (double r : roots) {
        c.push_back(0.0);
        for (std::size_t k = c.size() - 1; k > 0; --k)
            c[k] = c[k - 1] - r * c[k];
        c[0] *= -r;
    }
    return c;
}

std::vector<double> kept_roots(const ShapeAnsatz& a,
                               std::optional<std::size_t> deleted) {
    std::vector<double> kept;
    kept.reserve(a.roots.size());
    for (std::size_t i = 0; i < a.roots.size(); ++i)
        if (!deleted || i != *deleted) kept.push_back(a.roots[i]);
    return kept;
}

// Closed form via Beta functions, integrating in dE' = E - E_thr with the
// tail factor rewritten as ((Ebar+E_thr)/Ebar)^-beta (1 + E'/(Ebar+E_thr))^-beta.
double moment_closed_form(const ShapeAnsatz& a, int p,
                          const std::vector<double>& roots) {
    const double nu = a.threshold_exponent;
    std::vector<double> shifted(roots.size());
    for (std::size_t i = 0; i < roots.size(); ++i)
        shifted[i] = roots[i] - a.E_thr;
    std::vector<double> poly = poly_from_roots(shifted);
    // multiply by E^p = (E' + E_thr)^p
    for (int k = 0; k < p; ++k) {
        poly.push_back(0.0);
        for (std::size_t m = poly.size() - 1; m > 0; --m)
            poly[m] = poly[m - 1] + a.E_thr * poly[m];
        poly[0] *= a.E_thr;
    }
    const double scale = a.Ebar + a.E_thr;
    const double prefactor = std::pow(scale / a.Ebar, -a.beta);
    double total = 0.0;
    for (std::size_t m = 0; m < poly.size(); ++m) {
        if (poly[m] == 0.0) continue;
        const double x = static_cast<double>(m) + nu;
        if (!(a.beta - x > 0.0))
            throw std::invalid_argument(
                "ansatz moment diverges: beta too small for requested power");
        total += poly[m] * std::pow(scale, x) * std::exp(log_beta(x, a.beta - x));
    }
    return prefactor * total;
}

double moment_quadrature(const ShapeAnsatz& a, int p,
                         const std::vector<double>& roots) {
    const double nu = a.threshold_exponent;
    auto g = [&](double E) {
        double v = std::pow(E - a.E_thr, nu - 1.0) *
                   std::pow(E / a.Ebar + 1.0, -a.beta) * std::exp(a.gamma(E));
        for (double r : roots) v *= E - r;
        for (int k = 0; k < p; ++k) v *= E;
        return v;
    };
    SemiInfiniteDomain dom;
    dom.lower = a.E_thr;
    dom.threshold_exponent = nu;
    dom.splits = roots;
    dom.tail_scale = a.Ebar;
    // two passes: |g| integral fixes the scale for a relative tolerance
    auto l1 = integrate_semi_infinite([&](double E) { return std::abs(g(E)); },
                                      dom, 1e-6);
    const double tol = 1e-12 * std::max(l1.value, 1e-300);
    return integrate_semi_infinite(g, dom, tol).require();
}

double moment(const ShapeAnsatz& a, int p, const std::vector<double>& roots) {
    if (a.gamma_is_zero() && is_half_integer_family(a.threshold_exponent))
        return moment_closed_form(a, p, roots);
    return moment_quadrature(a, p, roots);
}

// Moment of the absolute-value envelope, the scale against which a vanishing
// moment is judged degenerate.
double moment_scale(const ShapeAnsatz& a, int p,
                    const std::vector<double>& roots) {
    const double nu = a.threshold_exponent;
    std::vector<double> shifted(roots.size());
    for (std::size_t i = 0; i < roots.size(); ++i)
        shifted[i] = roots[i] - a.E_thr;
    auto poly = poly_from_roots(shifted);
    for (int k = 0; k < p; ++k) {
        poly.push_back(0.0);
        for (std::size_t m = poly.size() - 1; m > 0; --m)
            poly[m] = std::abs(poly[m - 1]) + std::abs(a.E_thr) * poly[m];
        poly[0] *= std::abs(a.E_thr);
    }
    double gamma_bound = 0.0;
    for (double c : a.gamma_coeffs) gamma_bound += std::abs(c);
    const double scale = a.Ebar + a.E_thr;
    double total = 0.0;
    for (std::size_t m = 0; m < poly.size(); ++m) {
        const double x = static_cast<double>(m) + nu;
        if (a.beta - x > 0.0)
            total += std::abs(poly[m]) * std::pow(scale, x) *
                     std::exp(log_beta(x, a.beta - x));
    }
    return total * std::pow(scale / a.Ebar, -a.beta) * std::exp(gamma_bound);
}

}  // namespace

void ShapeAnsatz::validate(bool require_first_moment) const {
    if (!(Ebar > 0.0))
        throw std::invalid_argument("ShapeAnsatz: Ebar must be > 0");
    if (!(threshold_exponent > 0.0))
        throw std::invalid_argument("ShapeAnsatz: threshold exponent must be > 0");
    for (double r : roots)
        if (!std::isfinite(r))
            throw std::invalid_argument("ShapeAnsatz: roots must be finite");
    const double n = static_cast<double>(roots.size());
    if (!(beta > n + threshold_exponent))
        throw std::invalid_argument(
            "ShapeAnsatz: beta must exceed N + nu for a normalizable f'");
    if (require_first_moment && !(beta > n + threshold_exponent + 1.0))
        throw std::invalid_argument(
            "ShapeAnsatz: beta must exceed N + nu + 1 when the sum rule is imposed");
}

double ShapeAnsatz::gamma(double E) const {
    if (gamma_coeffs.empty()) return 0.0;
    const double q = (E - E_thr) / Ebar;
    const double s = 1.0 / (q + 1.0);
    double sum = 0.0;
    for (auto it = gamma_coeffs.rbegin(); it != gamma_coeffs.rend(); ++it)
        sum = *it + sum * s;
    return (q * s) * sum;
}

double ShapeAnsatz::gamma_tail_limit() const {
    return gamma_coeffs.empty() ? 0.0 : gamma_coeffs.front();
}

bool ShapeAnsatz::gamma_is_zero() const {
    return std::all_of(gamma_coeffs.begin(), gamma_coeffs.end(),
                       [](double c) { return c == 0.0; });
}

double eval_fprime(const ShapeAnsatz& a, double E) {
    if (!(E > a.E_thr))
        throw std::domain_error("eval_fprime: E must be above threshold");
    double v = a.C * std::pow(E - a.E_thr, a.threshold_exponent - 1.0) *
               std::pow(E / a.Ebar + 1.0, -a.beta) * std::exp(a.gamma(E));
    for (double r : a.roots) v *= E - r;
    return v;
}

namespace {

// Safe upper bound on integral |f'| dE, used to set absolute tolerances.
double fprime_l1_scale(const ShapeAnsatz& a) {
    std::vector<double> shifted(a.roots.size());
    for (std::size_t i = 0; i < a.roots.size(); ++i)
        shifted[i] = a.roots[i] - a.E_thr;
    const auto coeffs = poly_from_roots(shifted);
    const double nu = a.threshold_exponent;
    const double scale = a.Ebar + a.E_thr;
    double gamma_bound = 0.0;
    for (double c : a.gamma_coeffs) gamma_bound += std::abs(c);
    const double pre =
        std::pow(scale / a.Ebar, -a.beta) * std::exp(gamma_bound);
    double bound = 0.0;
    for (std::size_t m = 0; m < coeffs.size(); ++m) {
        const double x = static_cast<double>(m) + nu;
        if (a.beta - x > 0.0)
            bound += std::abs(coeffs[m]) * std::pow(scale, x) *
                     std::exp(log_beta(x, a.beta - x));
    }
    return std::abs(a.C) * pre * std::max(bound, 1e-300);
}

// integral of f' over [lo, hi] with the threshold substitution E = E_thr + t^2
// on the first stretch, breaks at interior roots, and far stretches taken in
// the compressed variable E = from + Ebar u/(1-u) so huge upper limits stay
// cheap.
double integrate_fprime_upto(const ShapeAnsatz& a, double lo, double hi,
                             double abs_tol) {
    auto fp = [&](double x) { return eval_fprime(a, x); };
    std::vector<double> breaks;
    for (double r : a.roots)
        if (r > lo && r < hi) breaks.push_back(r);
    std::sort(breaks.begin(), breaks.end());
    breaks.push_back(hi);
    const double tol = abs_tol / static_cast<double>(breaks.size());
    double acc = 0.0;
    double from = lo;
    bool first = from == a.E_thr;
    for (double b : breaks) {
        if (!(b > from)) continue;
        if (first) {
            const double t_hi = std::sqrt(b - a.E_thr);
            auto mapped = [&](double t) { return fp(a.E_thr + t * t) * 2.0 * t; };
            acc += integrate_adaptive(mapped, 0.0, t_hi, tol).require();
            first = false;
        } else if (b - from > 16.0 * a.Ebar) {
            const double L = a.Ebar;
            const double u_hi = (b - from) / (b - from + L);
            const double start = from;
            auto mapped = [&](double u) {
                const double om = 1.0 - u;
                return fp(start + L * u / om) * L / (om * om);
            };
            acc += integrate_adaptive(mapped, 0.0, u_hi, tol).require();
        } else {
            acc += integrate_adaptive(fp, from, b, tol).require();
        }
        from = b;
    }
    return acc;
}

}  // namespace

double eval_f(const ShapeAnsatz& a, double E) {
    if (E < a.E_thr)
        throw std::domain_error("eval_f: E below threshold");
    if (E == a.E_thr) return 0.0;
    const double tol = 1e-12 * fprime_l1_scale(a);
    return integrate_fprime_upto(a, a.E_thr, E, tol);
}

std::vector<double> eval_f_grid(const ShapeAnsatz& a,
                                const std::vector<double>& energies) {
    std::vector<double> out(energies.size(), 0.0);
    const double tol = 1e-13 * fprime_l1_scale(a);
    double acc = 0.0;
    double prev = a.E_thr;
    for (std::size_t i = 0; i < energies.size(); ++i) {
        const double E = energies[i];
        if (E < prev)
            throw std::invalid_argument("eval_f_grid: energies must be ascending");
        if (E > prev) {
            acc += integrate_fprime_upto(a, prev, E, tol);
            prev = E;
        }
        out[i] = acc;
    }
    return out;
}

double ansatz_moment(const ShapeAnsatz& a, int p,
                     std::optional<std::size_t> deleted_root) {
    if (deleted_root && *deleted_root >= a.roots.size())
        throw std::out_of_range("ansatz_moment: root index out of range");
    return moment(a, p, kept_roots(a, deleted_root));
}

ShapeAnsatz eliminate_root(const ShapeAnsatz& a, std::size_t which) {
    if (which >= a.roots.size())
        throw std::out_of_range("eliminate_root: root index out of range");
    a.validate(false);
    const auto kept = kept_roots(a, which);
    const double m0 = moment(a, 0, kept);
    const double m1 = moment(a, 1, kept);
    if (std::abs(m0) <= 1e-12 * moment_scale(a, 0, kept) ||
        !std::isfinite(m1 / m0))
        throw std::runtime_error("eliminate_root: degenerate integrand, M0 = 0");
    ShapeAnsatz out = a;
    out.roots[which] = m1 / m0;
    return out;
}

ShapeAnsatz normalize_C(const ShapeAnsatz& a, double S) {
    a.validate(true);
    const double m1 = moment(a, 1, a.roots);
    if (std::abs(m1) <= 1e-12 * moment_scale(a, 1, a.roots))
        throw std::runtime_error("normalize_C: first moment of the shape is zero");
    ShapeAnsatz out = a;
    out.C = -S / m1;
    return out;
}

int count_sign_changes(const ShapeAnsatz& a, double lo, double hi) {
    int n = 0;
    for (double r : a.roots)
        if (r > lo && r < hi) ++n;
    return n;
}

}  // namespace shapeinv
