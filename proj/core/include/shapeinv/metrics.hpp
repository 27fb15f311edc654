#pragma once

#include <functional>
#include <span>
#include <vector>

namespace shapeinv {

/// Root-mean-square relative deviations: input accuracy, fit quality and
/// solution accuracy as used throughout the experiments.
struct ChiReport {
    double chi_input = 0.0;
    double chi_fit = 0.0;
    double chi_solution = 0.0;
    int n1 = 0;  // solution sample count
    int n2 = 0;  // sigma sample count
    double e_min = 0.0;
    double e_max = 0.0;
};

/// RMS of (f_true - f_appr)/f_true over n1 uniform points in (e_min, e_max],
/// the left endpoint excluded (f_true vanishes at threshold).
double chi_solution(const std::function<double(double)>& f_true,
                    const std::function<double(double)>& f_appr,
                    double e_min = 0.0, double e_max = 42.0, int n1 = 200);

/// RMS of (phi_true - phi_appr)/phi_appr.
double chi_input(std::span<const double> phi_true,
                 std::span<const double> phi_appr);

/// RMS of (phi_appr - model)/phi_appr.
double chi_fit(std::span<const double> phi_appr, std::span<const double> model);

/// Windowed integrals of the deviation f_true - f_appr: a diagnostic that
/// leftover errors are narrow-peak-like rather than broad.
struct DeviationWindow {
    double lo = 0.0, hi = 0.0;
    double abs_integral = 0.0;
};
std::vector<DeviationWindow> deviation_profile(
    const std::function<double(double)>& f_true,
    const std::function<double(double)>& f_appr, double e_min, double e_max,
    double delta);

}  // namespace shapeinv
