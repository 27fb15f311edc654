#include "shapeinv/model_problem.hpp"

#include "shapeinv/quadrature.hpp"

#include <Eigen/Dense>

#include <cmath>
#include <complex>
#include <numbers>
#include <stdexcept>

namespace shapeinv {

double exact_f(const ModelProblem& p, double E) {
    if (E < 0.0) throw std::domain_error("exact_f: E must be >= 0");
    const double e0 = p.E0();
    const double x = E / e0;
    const double d = x + 1.0;
    return 4.0 / (std::numbers::pi * e0 * p.eta * p.eta * p.eta) * std::sqrt(x) /
           (d * d * d * d);
}

double exact_fprime(const ModelProblem& p, double E) {
    if (!(E > 0.0)) throw std::domain_error("exact_fprime: E must be > 0");
    const double e0 = p.E0();
    const double x = E / e0;
    return 2.0 / (std::numbers::pi * e0 * e0 * p.eta * p.eta * p.eta) *
           (1.0 - 7.0 * x) / (std::sqrt(x) * std::pow(1.0 + x, 5));
}

ShapeAnsatz exact_ansatz(const ModelProblem& p) {
    const double e0 = p.E0();
    ShapeAnsatz a;
    a.roots = {e0 / 7.0};
    a.Ebar = e0;
    a.beta = 5.0;
    a.threshold_exponent = 0.5;
    a.E_thr = 0.0;
    a.C = -14.0 /
          (std::numbers::pi * std::pow(e0, 2.5) * p.eta * p.eta * p.eta);
    return a;
}

void SampledInput::validate() const {
    if (sigma.size() != phi.size() || sigma.size() != weights.size())
        throw std::invalid_argument("SampledInput: length mismatch");
    for (double w : weights)
        if (!(w > 0.0))
            throw std::invalid_argument("SampledInput: weights must be positive");
    for (double v : phi)
        if (v == 0.0)
            throw std::invalid_argument(
                "SampledInput: phi must have no zeros under relative weighting");
}

namespace {

std::vector<double> relative_weights(const std::vector<double>& phi) {
    std::vector<double> w(phi.size());
    for (std::size_t i = 0; i < phi.size(); ++i) {
        if (phi[i] == 0.0)
            throw std::invalid_argument("relative weights need nonzero phi");
        w[i] = 1.0 / (phi[i] * phi[i]);
    }
    return w;
}

}  // namespace

SampledInput exact_input(const ModelProblem& p, const KernelSpec& spec,
                         double rel_tol) {
    spec.validate();
    SampledInput in;
    in.kernel = spec;
    in.sigma = sigma_grid(spec);
    in.provenance = Provenance::Exact;
    in.eta = p.eta;
    in.hbar2_over_2M = p.hbar2_over_2M;
    in.sum_rule = p.sum_rule();
    const double e0 = p.E0();
    in.phi.resize(in.sigma.size());
    for (std::size_t i = 0; i < in.sigma.size(); ++i) {
        const double s = in.sigma[i];
        auto g = [&](double E) { return kernel_K(spec, s, E) * exact_f(p, E); };
        SemiInfiniteDomain dom;
        dom.lower = 0.0;
        dom.threshold_exponent = 1.5;  // f ~ sqrt(E) near threshold
        dom.tail_scale = e0;
        if (spec.family == KernelFamily::Lorentz) {
            for (double d : {-5.0 * spec.sigma_I, -spec.sigma_I, spec.sigma_I,
                             5.0 * spec.sigma_I})
                if (s + d > 0.0) dom.splits.push_back(s + d);
        }
        const double coarse =
            integrate_semi_infinite(g, dom, 1e-8 * p.sum_rule()).value;
        const double tol = rel_tol * std::max(std::abs(coarse), 1e-300);
        in.phi[i] = integrate_semi_infinite(g, dom, tol).require();
    }
    in.weights = relative_weights(in.phi);
    return in;
}

// ---------------------------------------------------------------------------
// Galerkin machinery
// ---------------------------------------------------------------------------

namespace galerkin {

namespace {

// L^alpha_m(x) by upward recurrence.
double laguerre(int m, int alpha, double x) {
    if (m == 0) return 1.0;
    double lkm1 = 1.0;
    double lk = 1.0 + alpha - x;
    for (int k = 1; k < m; ++k) {
        const double lkp1 =
            ((2.0 * k + alpha + 1.0 - x) * lk - (k + alpha) * lkm1) / (k + 1.0);
        lkm1 = lk;
        lk = lkp1;
    }
    return lk;
}

double norm_factor(int n) { return 1.0 / std::sqrt(double(n) * (n + 1.0)); }

// scaled radial function without the b^(-3/2) volume factor:
// u_n(x) = x L^2_{n-1}(x) e^{-x/2}; phi_n(r) = norm b^{-3/2} b u_n(r/b).
double u_fn(int n, double x) {
    return x * laguerre(n - 1, 2, x) * std::exp(-0.5 * x);
}

// derivative polynomial P_n(x) = (1 - x/2) L^2_{n-1}(x) - x L^3_{n-2}(x),
// so that d/dr phi_n = norm b^{-3/2} P_n(x) e^{-x/2}.
double p_fn(int n, double x) {
    double v = (1.0 - 0.5 * x) * laguerre(n - 1, 2, x);
    if (n >= 2) v -= x * laguerre(n - 2, 3, x);
    return v;
}

int rule_size(int N0) { return 4 * N0 + 8; }

}  // namespace

double basis_fn(int n, double b, double r) {
    if (n < 1) throw std::invalid_argument("basis_fn: n must be >= 1");
    return norm_factor(n) * std::pow(b, -1.5) * r * laguerre(n - 1, 2, r / b) *
           std::exp(-r / (2.0 * b));
}

std::vector<double> overlap_matrix(int N0, double b) {
    (void)b;  // the overlap is scale free in x = r/b
    const auto rule = gauss_laguerre(rule_size(N0));
    std::vector<double> m(std::size_t(N0) * N0, 0.0);
    std::vector<double> lag(N0);
    for (std::size_t q = 0; q < rule.nodes.size(); ++q) {
        const double x = rule.nodes[q];
        for (int n = 1; n <= N0; ++n) lag[n - 1] = u_fn(n, x);
        for (int i = 0; i < N0; ++i)
            for (int j = i; j < N0; ++j)
                m[std::size_t(i) * N0 + j] += rule.weights[q] * lag[i] * lag[j];
    }
    for (int i = 0; i < N0; ++i)
        for (int j = i; j < N0; ++j) {
            const double v =
                m[std::size_t(i) * N0 + j] * norm_factor(i + 1) * norm_factor(j + 1);
            m[std::size_t(i) * N0 + j] = v;
            m[std::size_t(j) * N0 + i] = v;
        }
    return m;
}

std::vector<double> kinetic_matrix(int N0, double b, double hbar2_over_2M) {
    const auto rule = gauss_laguerre(rule_size(N0));
    std::vector<double> m(std::size_t(N0) * N0, 0.0);
    std::vector<double> pv(N0);
    for (std::size_t q = 0; q < rule.nodes.size(); ++q) {
        const double x = rule.nodes[q];
        const double damp = std::exp(-0.5 * x);
        for (int n = 1; n <= N0; ++n) pv[n - 1] = p_fn(n, x) * damp;
        for (int i = 0; i < N0; ++i)
            for (int j = i; j < N0; ++j)
                m[std::size_t(i) * N0 + j] += rule.weights[q] * pv[i] * pv[j];
    }
    const double pre = hbar2_over_2M / (b * b);
    for (int i = 0; i < N0; ++i)
        for (int j = i; j < N0; ++j) {
            const double v = pre * m[std::size_t(i) * N0 + j] *
                             norm_factor(i + 1) * norm_factor(j + 1);
            m[std::size_t(i) * N0 + j] = v;
            m[std::size_t(j) * N0 + i] = v;
        }
    return m;
}

std::vector<double> source_vector(int N0, double b, double eta) {
    // integral phi_n(r) r e^{-eta r} dr
    //   = norm b^{3/2} integral x^2 L^2_{n-1}(x) e^{-lambda x} dx, lambda = 1/2 + eta b;
    // substituting y = lambda x makes the weight exactly e^{-y}.
    const double lambda = 0.5 + eta * b;
    const auto rule = gauss_laguerre(rule_size(N0));
    std::vector<double> g(N0, 0.0);
    for (std::size_t q = 0; q < rule.nodes.size(); ++q) {
        const double y = rule.nodes[q];
        const double x = y / lambda;
        const double damped_x2 = x * x * std::exp(-y);
        for (int n = 1; n <= N0; ++n)
            g[n - 1] += rule.weights[q] * damped_x2 * laguerre(n - 1, 2, x);
    }
    const double pre = std::pow(b, 1.5) / lambda;
    for (int n = 1; n <= N0; ++n) g[n - 1] *= pre * norm_factor(n);
    return g;
}

}  // namespace galerkin

SampledInput galerkin_input(const ModelProblem& p, const KernelSpec& spec,
                            int N0, double b) {
    spec.validate();
    if (N0 < 1) throw std::invalid_argument("galerkin_input: N0 must be >= 1");
    if (spec.family == KernelFamily::Laplace)
        throw std::invalid_argument(
            "galerkin_input: only Lorentz and Stieltjes inputs have a basis route");

    const auto t_raw = galerkin::kinetic_matrix(N0, b, p.hbar2_over_2M);
    const auto g_raw = galerkin::source_vector(N0, b, p.eta);
    Eigen::MatrixXd T = Eigen::Map<const Eigen::MatrixXd>(t_raw.data(), N0, N0);
    Eigen::VectorXd g = Eigen::Map<const Eigen::VectorXd>(g_raw.data(), N0);

    SampledInput in;
    in.kernel = spec;
    in.sigma = sigma_grid(spec);
    in.provenance = Provenance::Galerkin;
    in.N0 = N0;
    in.eta = p.eta;
    in.hbar2_over_2M = p.hbar2_over_2M;
    in.sum_rule = p.sum_rule();
    in.phi.resize(in.sigma.size());

    if (spec.family == KernelFamily::Lorentz) {
        Eigen::MatrixXcd A(N0, N0);
        for (std::size_t i = 0; i < in.sigma.size(); ++i) {
            const std::complex<double> s(in.sigma[i], spec.sigma_I);
            A = T.cast<std::complex<double>>();
            A.diagonal().array() -= s;
            Eigen::VectorXcd c = A.partialPivLu().solve(g.cast<std::complex<double>>());
            // |psi|^2 integrates to sum |c_n|^2; the sigma_I/pi factor matches
            // the normalized kernel
            in.phi[i] = spec.sigma_I / std::numbers::pi * c.squaredNorm();
        }
    } else {
        Eigen::MatrixXd A(N0, N0);
        for (std::size_t i = 0; i < in.sigma.size(); ++i) {
            A = T;
            A.diagonal().array() -= in.sigma[i];
            Eigen::VectorXd c = A.partialPivLu().solve(g);
            in.phi[i] = c.dot(g);
        }
    }
    in.weights = relative_weights(in.phi);
    return in;
}

namespace {

// Deterministic standard normals: mt19937_64 bits -> uniforms -> Box-Muller.
class NormalDraws {
public:
    explicit NormalDraws(std::uint64_t seed) : state_(seed) {}

    double operator()() {
        if (have_spare_) {
            have_spare_ = false;
            return spare_;
        }
        double u1 = uniform();
        while (u1 <= 0.0) u1 = uniform();
        const double u2 = uniform();
        const double r = std::sqrt(-2.0 * std::log(u1));
        const double t = 2.0 * std::numbers::pi * u2;
        spare_ = r * std::sin(t);
        have_spare_ = true;
        return r * std::cos(t);
    }

private:
    double uniform() {
        return static_cast<double>(next() >> 11) * 0x1.0p-53;
    }
    std::uint64_t next() {
        // xorshift* step seeded splitmix-style; self-contained and portable
        state_ += 0x9E3779B97F4A7C15ull;
        std::uint64_t z = state_;
        z = (z ^ (z >> 30)) * 0xBF58476D1CE4E5B9ull;
        z = (z ^ (z >> 27)) * 0x94D049BB133111EBull;
        return z ^ (z >> 31);
    }
    std::uint64_t state_;
    bool have_spare_ = false;
    double spare_ = 0.0;
};

}  // namespace

SampledInput noisy_input(const SampledInput& base, double tau,
                         std::uint64_t seed) {
    if (tau < 0.0) throw std::invalid_argument("noisy_input: tau must be >= 0");
    if (tau == 0.0) return base;
    SampledInput out = base;
    out.provenance = Provenance::Noisy;
    out.tau = tau;
    out.seed = seed;
    NormalDraws draw(seed);
    for (double& v : out.phi) v *= 1.0 + tau * draw();
    out.weights = relative_weights(out.phi);
    return out;
}

}  // namespace shapeinv
