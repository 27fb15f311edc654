#pragma once

#include "shapeinv/ansatz.hpp"
#include "shapeinv/kernels.hpp"

#include <cstdint>
#include <vector>

namespace shapeinv {

/// Free s-wave test problem: the exact solution is
///   f(E) = (4/(pi E0 eta^3)) sqrt(E/E0) / (E/E0 + 1)^4,  E_thr = 0,
/// with E0 = (hbar^2/2M) eta^2 and sum rule integral f dE = 1/(4 eta^3).
struct ModelProblem {
    double eta = 1.0;                      // 1/fm
    double hbar2_over_2M = 20.7212603615;  // MeV fm^2 (nucleon mass)

    double E0() const { return hbar2_over_2M * eta * eta; }
    double sum_rule() const { return 0.25 / (eta * eta * eta); }
    static constexpr double E_thr = 0.0;
};

double exact_f(const ModelProblem& p, double E);
double exact_fprime(const ModelProblem& p, double E);

/// The exact solution expressed in ansatz form:
/// N = 1, E_1 = E0/7, Ebar = E0, beta = 5, nu = 1/2, gamma = 0,
/// C = -14/(pi E0^(5/2) eta^3).
ShapeAnsatz exact_ansatz(const ModelProblem& p);

enum class Provenance { Exact, Galerkin, Noisy };

struct SampledInput {
    std::vector<double> sigma;
    std::vector<double> phi;
    std::vector<double> weights;  // 1/phi^2 for the relative norm
    KernelSpec kernel;
    Provenance provenance = Provenance::Exact;
    int N0 = 0;           // Galerkin basis size
    double tau = 0.0;     // noise level
    std::uint64_t seed = 0;
    double eta = 1.0;
    double hbar2_over_2M = 20.7212603615;
    double sum_rule = 0.25;

    void validate() const;
    ModelProblem problem() const { return {eta, hbar2_over_2M}; }
};

/// Transform of the exact solution on the spec's grid, by quadrature with
/// per-point relative tolerance rel_tol.
SampledInput exact_input(const ModelProblem& p, const KernelSpec& spec,
                         double rel_tol = 1e-12);

/// Approximate transform from the truncated-basis solution of the driven
/// equation -(hbar^2/2M) psi'' - s psi = r exp(-eta r), psi(0) = 0, expanded
/// over N0 orthonormal Laguerre-type functions of length scale b.
/// Lorentz and Stieltjes families only.
SampledInput galerkin_input(const ModelProblem& p, const KernelSpec& spec,
                            int N0, double b = 0.3);

/// Multiplicative Gaussian noise phi -> phi (1 + tau rho), rho ~ N(0,1),
/// drawn from an explicitly seeded generator (bit-reproducible per platform).
SampledInput noisy_input(const SampledInput& base, double tau,
                         std::uint64_t seed);

/// Laguerre basis machinery, exposed for validation.
namespace galerkin {

/// phi_n(r) = [n(n+1)]^(-1/2) b^(-3/2) r L^2_{n-1}(r/b) exp(-r/(2b)), n >= 1.
double basis_fn(int n, double b, double r);

/// Overlap matrix by the same quadrature as the Hamiltonian build
/// (should be the identity), row-major N0 x N0.
std::vector<double> overlap_matrix(int N0, double b);

/// Kinetic matrix T_mn = (hbar^2/2M) integral phi'_m phi'_n dr, row-major.
std::vector<double> kinetic_matrix(int N0, double b, double hbar2_over_2M);

/// Source vector g_n = integral phi_n(r) r exp(-eta r) dr.
std::vector<double> source_vector(int N0, double b, double eta);

}  // namespace galerkin

}  // namespace shapeinv
