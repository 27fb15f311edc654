#pragma once

#include "shapeinv/model_problem.hpp"

#include <span>
#include <vector>

namespace shapeinv {

/// Comparison method: f_N(E) = sum_n c_n E^(n-1/2) exp(-alpha E), linear in
/// the c_n, with the truncation order N acting as the regularization knob.
struct BasisExpansion {
    int N = 0;
    double alpha = 0.0;  // 1/MeV
    std::vector<double> coeffs;
    double objective = 0.0;
    double chi_fit = 0.0;
    double condition_estimate = 0.0;  // |R_00 / R_kk| from the factorization
    int rank = 0;

    void validate() const;
};

double basis_fn(int n, double alpha, double E);
double eval_expansion(const BasisExpansion& e, double E);

/// Transforms of all basis functions n = 1..n_max on the input grid,
/// precomputed once per alpha (quadrature at 1e-12 relative tolerance).
/// columns[(a * n_max + (n-1)) * grid + i].
struct BasisTransformTable {
    int n_max = 0;
    std::vector<double> alphas;
    std::size_t grid_size = 0;
    std::vector<double> values;

    std::span<const double> column(std::size_t alpha_idx, int n) const;
};

BasisTransformTable precompute_basis_transforms(const SampledInput& input,
                                                int n_max,
                                                std::span<const double> alphas,
                                                int threads = 0);

/// 40 log-spaced points in [0.01, 2] 1/MeV.
std::vector<double> default_alpha_grid();

/// Weighted linear least squares for the c_n at each alpha of the table
/// (orthogonal factorization, minimum-norm solution on rank deficiency);
/// returns the alpha with the smallest objective.
BasisExpansion fit_standard(const SampledInput& input, int N,
                            const BasisTransformTable& table);

/// Convenience: builds the table for this N alone and fits.
BasisExpansion fit_standard(const SampledInput& input, int N,
                            std::span<const double> alpha_grid,
                            int threads = 0);

/// Hard cap on N; the expansion is known to destabilize well below this.
inline constexpr int kMaxBasisSize = 16;

}  // namespace shapeinv
