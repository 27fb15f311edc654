#pragma once

#include <string>
#include <vector>

namespace shapeinv {

enum class KernelFamily { Lorentz, Stieltjes, Laplace };

const char* family_name(KernelFamily f);
KernelFamily family_from_name(const std::string& name);

/// Transform family plus its evaluation-variable window.
///
/// sigma is sigma_R (MeV) for Lorentz, s < 0 (MeV) for Stieltjes and
/// z >= 0 (1/MeV) for Laplace. Energies are measured from E = 0.
struct KernelSpec {
    KernelFamily family = KernelFamily::Lorentz;
    double sigma_I = 0.0;  // Lorentz width, MeV
    double sigma_min = 0.0;
    double sigma_max = 0.0;
    int n_samples = 100;

    static KernelSpec lorentz(double sigma_I, double sigma_min = -2.0,
                              double sigma_max = 41.4, int n_samples = 100);
    /// Window [s_max - span, s_max], entirely negative.
    static KernelSpec stieltjes(double s_max = -2.0, double span = 41.4,
                                int n_samples = 100);
    static KernelSpec laplace(double z_max = 1.9304, int n_samples = 100);

    void validate() const;  // throws std::invalid_argument
};

/// K(sigma, E): Lorentz (sigma_I/pi)/((sigma_R-E)^2+sigma_I^2),
/// Stieltjes 1/(E-s), Laplace exp(-zE).
double kernel_K(const KernelSpec& spec, double sigma, double E);

/// Integrated kernel Ktilde = -integral of K dE, with the integration
/// constant fixed to the forms below:
/// Lorentz -arctan((E-sigma_R)/sigma_I)/pi, Stieltjes -log(E-s),
/// Laplace exp(-zE) (the matching input side is z*Phi(z)).
double kernel_Ktilde(const KernelSpec& spec, double sigma, double E);

/// Uniform sampling of [sigma_min, sigma_max], both ends included.
std::vector<double> sigma_grid(const KernelSpec& spec);

}  // namespace shapeinv
