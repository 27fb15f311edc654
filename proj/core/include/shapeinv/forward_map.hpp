#pragma once

#include "shapeinv/ansatz.hpp"
#include "shapeinv/kernels.hpp"

#include <vector>

namespace shapeinv {

struct TransformCurve {
    std::vector<double> sigma;
    std::vector<double> values;
    KernelFamily family = KernelFamily::Lorentz;

    void validate() const;  // equal lengths, sigma strictly increasing
};

/// Transform of f' at a single evaluation point:
/// Lorentz/Stieltjes integral Ktilde(sigma,E) f'(E) dE, Laplace
/// integral exp(-zE) f'(E) dE (to be compared against z Phi(z)).
double transform_point(const ShapeAnsatz& a, const KernelSpec& spec,
                       double sigma, double abs_tol);

/// Transform of f' on the whole sigma grid of the spec. All grid points
/// share one adaptive subdivision of the energy axis; the subdivision is
/// refined until every point meets abs_tol, so results are deterministic
/// and independent of any outer parallelism.
TransformCurve apply_ktilde(const ShapeAnsatz& a, const KernelSpec& spec,
                            double abs_tol);

/// Same on an explicit grid (used when inputs carry their own sigma values).
std::vector<double> apply_ktilde_on(const ShapeAnsatz& a, const KernelSpec& spec,
                                    const std::vector<double>& sigma,
                                    double abs_tol);

}  // namespace shapeinv
