#include "shapeinv/forward_map.hpp"

#include "shapeinv/quadrature.hpp"

#include <cmath>
#include <numbers>
#include <stdexcept>

namespace shapeinv {

void TransformCurve::validate() const {
    if (sigma.size() != values.size())
        throw std::invalid_argument("TransformCurve: length mismatch");
    for (std::size_t i = 1; i < sigma.size(); ++i)
        if (!(sigma[i] > sigma[i - 1]))
            throw std::invalid_argument("TransformCurve: sigma must be increasing");
}

namespace {

// Effective integrated kernel used inside the fit integrals. For Stieltjes
// the constant -log(-s) is removed: constants are annihilated by the
// integral f' dE = 0 constraint, and removing the large offset avoids
// cancellation at |s| >> E.
double ktilde_eff(const KernelSpec& spec, double sigma, double E) {
    switch (spec.family) {
        case KernelFamily::Lorentz:
            return -std::atan((E - sigma) / spec.sigma_I) / std::numbers::pi;
        case KernelFamily::Stieltjes:
            return -std::log1p(E / -sigma);
        case KernelFamily::Laplace:
            return std::exp(-sigma * E);
    }
    return 0.0;
}

SemiInfiniteDomain fit_domain(const ShapeAnsatz& a, const KernelSpec& spec,
                              const std::vector<double>* sigma_points) {
    SemiInfiniteDomain dom;
    dom.lower = a.E_thr;
    dom.threshold_exponent = a.threshold_exponent;
    dom.splits = a.roots;
    if (spec.family == KernelFamily::Lorentz && sigma_points) {
        // the arctan varies on the sigma_I scale around each sigma_R; seed the
        // subdivision with the window covered by the grid
        const double lo = sigma_points->front() - spec.sigma_I;
        const double hi = sigma_points->back() + spec.sigma_I;
        if (lo > a.E_thr) dom.splits.push_back(lo);
        if (hi > a.E_thr) dom.splits.push_back(hi);
    }
    dom.tail_scale = a.Ebar;
    return dom;
}

}  // namespace

double transform_point(const ShapeAnsatz& a, const KernelSpec& spec,
                       double sigma, double abs_tol) {
    if (spec.family == KernelFamily::Stieltjes && !(sigma < 0.0))
        throw std::domain_error("Stieltjes transform requires s < 0");
    if (spec.family == KernelFamily::Laplace && sigma == 0.0) return 0.0;
    SemiInfiniteDomain dom = fit_domain(a, spec, nullptr);
    if (spec.family == KernelFamily::Lorentz) {
        for (double d : {-5.0 * spec.sigma_I, -spec.sigma_I, spec.sigma_I,
                         5.0 * spec.sigma_I})
            if (sigma + d > a.E_thr) dom.splits.push_back(sigma + d);
    }
    auto g = [&](double E) {
        return ktilde_eff(spec, sigma, E) * eval_fprime(a, E);
    };
    return integrate_semi_infinite(g, dom, abs_tol).require();
}

std::vector<double> apply_ktilde_on(const ShapeAnsatz& a, const KernelSpec& spec,
                                    const std::vector<double>& sigma,
                                    double abs_tol) {
    if (sigma.empty()) return {};
    if (spec.family == KernelFamily::Stieltjes)
        for (double s : sigma)
            if (!(s < 0.0))
                throw std::domain_error("Stieltjes transform requires s < 0");
    const int m = static_cast<int>(sigma.size());
    SemiInfiniteDomain dom = fit_domain(a, spec, &sigma);
    auto g = [&](double E, double* out) {
        const double fp = eval_fprime(a, E);
        for (int j = 0; j < m; ++j)
            out[j] = ktilde_eff(spec, sigma[j], E) * fp;
    };
    auto res = integrate_semi_infinite_vector(g, m, dom, abs_tol);
    if (!res.converged)
        throw std::runtime_error("apply_ktilde: quadrature did not converge");
    if (spec.family == KernelFamily::Laplace)
        for (int j = 0; j < m; ++j)
            if (sigma[j] == 0.0) res.values[j] = 0.0;
    return res.values;
}

TransformCurve apply_ktilde(const ShapeAnsatz& a, const KernelSpec& spec,
                            double abs_tol) {
    TransformCurve curve;
    curve.family = spec.family;
    curve.sigma = sigma_grid(spec);
    curve.values = apply_ktilde_on(a, spec, curve.sigma, abs_tol);
    return curve;
}

}  // namespace shapeinv
