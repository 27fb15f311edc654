#include "shapeinv/kernels.hpp"

#include <cmath>
#include <numbers>
#include <stdexcept>
#include <string>

namespace shapeinv {

const char* family_name(KernelFamily f) {
    switch (f) {
        case KernelFamily::Lorentz: return "lorentz";
        case KernelFamily::Stieltjes: return "stieltjes";
        case KernelFamily::Laplace: return "laplace";
    }
    return "?";
}

KernelFamily family_from_name(const std::string& name) {
    if (name == "lorentz") return KernelFamily::Lorentz;
    if (name == "stieltjes") return KernelFamily::Stieltjes;
    if (name == "laplace") return KernelFamily::Laplace;
    throw std::invalid_argument("unknown kernel family: " + name);
}

KernelSpec KernelSpec::lorentz(double sigma_I, double sigma_min,
                               double sigma_max, int n_samples) {
    KernelSpec s{KernelFamily::Lorentz, sigma_I, sigma_min, sigma_max, n_samples};
    s.validate();
    return s;
}

KernelSpec KernelSpec::stieltjes(double s_max, double span, int n_samples) {
    KernelSpec s{KernelFamily::Stieltjes, 0.0, s_max - span, s_max, n_samples};
    s.validate();
    return s;
}

KernelSpec KernelSpec::laplace(double z_max, int n_samples) {
    KernelSpec s{KernelFamily::Laplace, 0.0, 0.0, z_max, n_samples};
    s.validate();
    return s;
}

void KernelSpec::validate() const {
    if (!(sigma_min < sigma_max))
        throw std::invalid_argument("KernelSpec: empty sigma range");
    if (n_samples < 2)
        throw std::invalid_argument("KernelSpec: n_samples must be >= 2");
    switch (family) {
        case KernelFamily::Lorentz:
            if (!(sigma_I > 0.0))
                throw std::invalid_argument("KernelSpec: Lorentz requires sigma_I > 0");
            break;
        case KernelFamily::Stieltjes:
            if (!(sigma_max < 0.0))
                throw std::invalid_argument(
                    "KernelSpec: Stieltjes range must be entirely negative");
            break;
        case KernelFamily::Laplace:
            if (sigma_min < 0.0 || !std::isfinite(sigma_max))
                throw std::invalid_argument(
                    "KernelSpec: Laplace range must lie within [0, z_max]");
            break;
    }
}

namespace {

void check_domain(const KernelSpec& spec, double sigma, double E) {
    if (E < 0.0)
        throw std::domain_error("kernel: E below threshold");
    if (spec.family == KernelFamily::Stieltjes && !(E - sigma > 0.0))
        throw std::domain_error("Stieltjes kernel: E - s must be positive");
}

}  // namespace

double kernel_K(const KernelSpec& spec, double sigma, double E) {
    check_domain(spec, sigma, E);
    switch (spec.family) {
        case KernelFamily::Lorentz: {
            const double d = sigma - E;
            return (spec.sigma_I / std::numbers::pi) /
                   (d * d + spec.sigma_I * spec.sigma_I);
        }
        case KernelFamily::Stieltjes:
            return 1.0 / (E - sigma);
        case KernelFamily::Laplace:
            return std::exp(-sigma * E);
    }
    return 0.0;
}

double kernel_Ktilde(const KernelSpec& spec, double sigma, double E) {
    check_domain(spec, sigma, E);
    switch (spec.family) {
        case KernelFamily::Lorentz:
            return -std::atan((E - sigma) / spec.sigma_I) / std::numbers::pi;
        case KernelFamily::Stieltjes:
            return -std::log(E - sigma);
        case KernelFamily::Laplace:
            return std::exp(-sigma * E);
    }
    return 0.0;
}

std::vector<double> sigma_grid(const KernelSpec& spec) {
    spec.validate();
    std::vector<double> grid(spec.n_samples);
    const double h = (spec.sigma_max - spec.sigma_min) / (spec.n_samples - 1);
    for (int i = 0; i < spec.n_samples; ++i) grid[i] = spec.sigma_min + h * i;
    grid.front() = spec.sigma_min;
    grid.back() = spec.sigma_max;
    return grid;
}

}  // namespace shapeinv
