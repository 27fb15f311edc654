#pragma once

#include "shapeinv/fitter.hpp"
#include "shapeinv/forward_map.hpp"
#include "shapeinv/metrics.hpp"
#include "shapeinv/model_problem.hpp"

#include <filesystem>
#include <string>

namespace shapeinv::io {

/// Curves are CSV with a header row and full-precision scientific values;
/// metadata and results are JSON.

void write_curve_csv(const std::filesystem::path& path,
                     const std::string& x_name, const std::string& y_name,
                     const std::vector<double>& x, const std::vector<double>& y);

void write_table_csv(const std::filesystem::path& path,
                     const std::vector<std::string>& header,
                     const std::vector<std::vector<double>>& columns);

void write_transform_curve(const std::filesystem::path& path,
                           const TransformCurve& curve);

/// Input files live as <base>.csv (sigma, phi) plus a <base>.json sidecar
/// carrying the kernel spec, provenance and model-problem constants.
void write_input(const std::filesystem::path& base, const SampledInput& input);
SampledInput read_input(const std::filesystem::path& base);

std::string ansatz_to_json(const ShapeAnsatz& a);
ShapeAnsatz ansatz_from_json(const std::string& text);

void write_fit_result(const std::filesystem::path& path, const FitResult& fit);
void write_chi_report(const std::filesystem::path& path, const ChiReport& chi);

}  // namespace shapeinv::io
