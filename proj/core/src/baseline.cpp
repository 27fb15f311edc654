#include "shapeinv/baseline.hpp"

#include "shapeinv/parallel.hpp"
#include "shapeinv/quadrature.hpp"

#include <Eigen/Dense>

#include <cmath>
#include <stdexcept>

namespace shapeinv {

void BasisExpansion::validate() const {
    if (N < 1 || static_cast<int>(coeffs.size()) != N)
        throw std::invalid_argument("BasisExpansion: inconsistent size");
    if (!(alpha > 0.0))
        throw std::invalid_argument("BasisExpansion: alpha must be > 0");
}

double basis_fn(int n, double alpha, double E) {
    if (n < 1) throw std::invalid_argument("basis_fn: n must be >= 1");
    if (E < 0.0) throw std::domain_error("basis_fn: E must be >= 0");
    return std::pow(E, n - 0.5) * std::exp(-alpha * E);
}

double eval_expansion(const BasisExpansion& e, double E) {
    double v = 0.0;
    for (int n = 1; n <= e.N; ++n) v += e.coeffs[n - 1] * basis_fn(n, e.alpha, E);
    return v;
}

std::vector<double> default_alpha_grid() {
    std::vector<double> g(40);
    const double lo = 0.01, hi = 2.0;
    const double r = std::log(hi / lo) / (g.size() - 1);
    for (std::size_t i = 0; i < g.size(); ++i) g[i] = lo * std::exp(r * i);
    return g;
}

std::span<const double> BasisTransformTable::column(std::size_t alpha_idx,
                                                    int n) const {
    const std::size_t off =
        (alpha_idx * n_max + static_cast<std::size_t>(n - 1)) * grid_size;
    return {values.data() + off, grid_size};
}

BasisTransformTable precompute_basis_transforms(const SampledInput& input,
                                                int n_max,
                                                std::span<const double> alphas,
                                                int threads) {
    input.validate();
    if (n_max < 1 || n_max > kMaxBasisSize)
        throw std::invalid_argument("basis transforms: N out of range");
    BasisTransformTable t;
    t.n_max = n_max;
    t.alphas.assign(alphas.begin(), alphas.end());
    t.grid_size = input.sigma.size();
    t.values.assign(t.alphas.size() * n_max * t.grid_size, 0.0);

    const KernelSpec& spec = input.kernel;
    parallel_for(t.alphas.size() * n_max, threads, [&](std::size_t job) {
        const std::size_t a = job / n_max;
        const int n = static_cast<int>(job % n_max) + 1;
        const double alpha = t.alphas[a];
        // the integrand peaks near (n-1/2)/alpha and decays as exp(-alpha E)
        const double scale = (n + 0.5) / std::max(alpha, 1e-3);
        for (std::size_t i = 0; i < t.grid_size; ++i) {
            const double s = input.sigma[i];
            auto g = [&](double E) {
                return kernel_K(spec, s, E) * basis_fn(n, alpha, E);
            };
            SemiInfiniteDomain dom;
            dom.lower = 0.0;
            dom.threshold_exponent = n + 0.5;
            dom.tail_scale = scale;
            if (spec.family == KernelFamily::Lorentz) {
                for (double d : {-5.0 * spec.sigma_I, -spec.sigma_I,
                                 spec.sigma_I, 5.0 * spec.sigma_I})
                    if (s + d > 0.0) dom.splits.push_back(s + d);
            }
            const double coarse = integrate_semi_infinite(g, dom, 1e-4).value;
            const double tol = 1e-12 * std::max(std::abs(coarse), 1e-300);
            t.values[(a * n_max + (n - 1)) * t.grid_size + i] =
                integrate_semi_infinite(g, dom, tol).require();
        }
    });
    return t;
}

BasisExpansion fit_standard(const SampledInput& input, int N,
                            const BasisTransformTable& table) {
    input.validate();
    if (N < 1 || N > table.n_max)
        throw std::invalid_argument("fit_standard: N outside the table");
    const std::size_t rows = input.sigma.size();
    // the baseline fits K f_N to Phi directly, so Phi is the target for
    // every family
    const std::vector<double>& targets = input.phi;

    Eigen::VectorXd sw(rows);
    for (std::size_t i = 0; i < rows; ++i) sw[i] = std::sqrt(input.weights[i]);

    BasisExpansion best;
    bool have = false;
    Eigen::MatrixXd A(rows, N);
    Eigen::VectorXd b(rows);
    for (std::size_t i = 0; i < rows; ++i) b[i] = sw[i] * targets[i];

    for (std::size_t a = 0; a < table.alphas.size(); ++a) {
        for (int n = 1; n <= N; ++n) {
            const auto col = table.column(a, n);
            for (std::size_t i = 0; i < rows; ++i) A(i, n - 1) = sw[i] * col[i];
        }
        Eigen::CompleteOrthogonalDecomposition<Eigen::MatrixXd> cod(A);
        Eigen::VectorXd c = cod.solve(b);
        const double obj = (A * c - b).squaredNorm();
        if (!have || obj < best.objective ||
            (obj == best.objective && table.alphas[a] < best.alpha)) {
            best.N = N;
            best.alpha = table.alphas[a];
            best.coeffs.assign(c.data(), c.data() + N);
            best.objective = obj;
            const auto& qr = cod.matrixQTZ();
            const double r00 = std::abs(qr(0, 0));
            const int rank = static_cast<int>(cod.rank());
            const double rkk =
                rank > 0 ? std::abs(qr(rank - 1, rank - 1)) : r00;
            best.condition_estimate = rkk > 0.0 ? r00 / rkk : 0.0;
            best.rank = rank;
            have = true;
        }
    }
    if (!have) throw std::runtime_error("fit_standard: empty alpha grid");
    best.chi_fit = std::sqrt(best.objective / static_cast<double>(rows));
    return best;
}

BasisExpansion fit_standard(const SampledInput& input, int N,
                            std::span<const double> alpha_grid, int threads) {
    const auto table = precompute_basis_transforms(input, N, alpha_grid, threads);
    return fit_standard(input, N, table);
}

}  // namespace shapeinv
