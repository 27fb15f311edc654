#include "shapeinv/metrics.hpp"

#include "shapeinv/quadrature.hpp"

#include <cmath>
#include <stdexcept>
#include <string>

namespace shapeinv {

namespace {

double rms(std::span<const double> r) {
    double s = 0.0;
    for (double v : r) s += v * v;
    return std::sqrt(s / static_cast<double>(r.size()));
}

}  // namespace

double chi_solution(const std::function<double(double)>& f_true,
                    const std::function<double(double)>& f_appr,
                    double e_min, double e_max, int n1) {
    if (n1 < 1) throw std::invalid_argument("chi_solution: n1 must be >= 1");
    std::vector<double> r(n1);
    for (int j = 1; j <= n1; ++j) {
        const double E = e_min + (e_max - e_min) * j / n1;
        const double ft = f_true(E);
        if (ft == 0.0)
            throw std::runtime_error("chi_solution: f_true vanishes at E = " +
                                     std::to_string(E));
        r[j - 1] = (ft - f_appr(E)) / ft;
    }
    return rms(r);
}

double chi_input(std::span<const double> phi_true,
                 std::span<const double> phi_appr) {
    if (phi_true.size() != phi_appr.size() || phi_true.empty())
        throw std::invalid_argument("chi_input: size mismatch");
    std::vector<double> r(phi_true.size());
    for (std::size_t i = 0; i < phi_true.size(); ++i) {
        if (phi_appr[i] == 0.0)
            throw std::runtime_error("chi_input: zero denominator at sample " +
                                     std::to_string(i));
        r[i] = (phi_true[i] - phi_appr[i]) / phi_appr[i];
    }
    return rms(r);
}

double chi_fit(std::span<const double> phi_appr, std::span<const double> model) {
    if (phi_appr.size() != model.size() || phi_appr.empty())
        throw std::invalid_argument("chi_fit: size mismatch");
    std::vector<double> r(phi_appr.size());
    for (std::size_t i = 0; i < phi_appr.size(); ++i) {
        if (phi_appr[i] == 0.0)
            throw std::runtime_error("chi_fit: zero denominator at sample " +
                                     std::to_string(i));
        r[i] = (phi_appr[i] - model[i]) / phi_appr[i];
    }
    return rms(r);
}

std::vector<DeviationWindow> deviation_profile(
    const std::function<double(double)>& f_true,
    const std::function<double(double)>& f_appr, double e_min, double e_max,
    double delta) {
    if (!(delta > 0.0))
        throw std::invalid_argument("deviation_profile: delta must be > 0");
    std::vector<DeviationWindow> out;
    auto diff = [&](double E) { return f_true(E) - f_appr(E); };
    for (double lo = e_min; lo < e_max; lo += delta) {
        const double hi = std::min(lo + delta, e_max);
        const auto q = integrate_adaptive(diff, lo, hi, 1e-14);
        out.push_back({lo, hi, std::abs(q.value)});
    }
    return out;
}

}  // namespace shapeinv
