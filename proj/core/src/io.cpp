#include "shapeinv/io.hpp"

#include <json.hpp>

#include <cstdio>
#include <fstream>
#include <stdexcept>

namespace shapeinv::io {

using nlohmann::json;

namespace {

std::string fmt(double v) {
    char buf[40];
    std::snprintf(buf, sizeof buf, "%.17e", v);
    return buf;
}

std::ofstream open_out(const std::filesystem::path& path) {
    if (path.has_parent_path())
        std::filesystem::create_directories(path.parent_path());
    std::ofstream out(path);
    if (!out) throw std::runtime_error("cannot write " + path.string());
    return out;
}

const char* provenance_name(Provenance p) {
    switch (p) {
        case Provenance::Exact: return "exact";
        case Provenance::Galerkin: return "galerkin";
        case Provenance::Noisy: return "noisy";
    }
    return "?";
}

Provenance provenance_from_name(const std::string& s) {
    if (s == "exact") return Provenance::Exact;
    if (s == "galerkin") return Provenance::Galerkin;
    if (s == "noisy") return Provenance::Noisy;
    throw std::invalid_argument("unknown provenance: " + s);
}

}  // namespace

void write_curve_csv(const std::filesystem::path& path,
                     const std::string& x_name, const std::string& y_name,
                     const std::vector<double>& x, const std::vector<double>& y) {
    if (x.size() != y.size())
        throw std::invalid_argument("write_curve_csv: length mismatch");
    auto out = open_out(path);
    out << x_name << ',' << y_name << '\n';
    for (std::size_t i = 0; i < x.size(); ++i)
        out << fmt(x[i]) << ',' << fmt(y[i]) << '\n';
}

void write_table_csv(const std::filesystem::path& path,
                     const std::vector<std::string>& header,
                     const std::vector<std::vector<double>>& columns) {
    if (header.size() != columns.size())
        throw std::invalid_argument("write_table_csv: header/column mismatch");
    auto out = open_out(path);
    for (std::size_t c = 0; c < header.size(); ++c)
        out << header[c] << (c + 1 < header.size() ? ',' : '\n');
    const std::size_t rows = columns.empty() ? 0 : columns.front().size();
    for (const auto& col : columns)
        if (col.size() != rows)
            throw std::invalid_argument("write_table_csv: ragged columns");
    for (std::size_t r = 0; r < rows; ++r)
        for (std::size_t c = 0; c < columns.size(); ++c)
            out << fmt(columns[c][r]) << (c + 1 < columns.size() ? ',' : '\n');
}

void write_transform_curve(const std::filesystem::path& path,
                           const TransformCurve& curve) {
    write_curve_csv(path, "sigma", "value", curve.sigma, curve.values);
}

void write_input(const std::filesystem::path& base, const SampledInput& input) {
    input.validate();
    std::filesystem::path csv = base;
    csv += ".csv";
    write_curve_csv(csv, "sigma", "phi", input.sigma, input.phi);

    json side;
    side["family"] = family_name(input.kernel.family);
    side["sigma_I"] = input.kernel.sigma_I;
    side["sigma_min"] = input.kernel.sigma_min;
    side["sigma_max"] = input.kernel.sigma_max;
    side["n_samples"] = input.kernel.n_samples;
    side["provenance"] = provenance_name(input.provenance);
    if (input.provenance == Provenance::Galerkin) side["N0"] = input.N0;
    if (input.provenance == Provenance::Noisy) {
        side["tau"] = input.tau;
        side["seed"] = input.seed;
    }
    side["eta"] = input.eta;
    side["hbar2_over_2M"] = input.hbar2_over_2M;
    side["E0"] = input.problem().E0();
    side["sum_rule"] = input.sum_rule;
    side["weights"] = "relative";

    std::filesystem::path js = base;
    js += ".json";
    open_out(js) << side.dump(2) << '\n';
}

SampledInput read_input(const std::filesystem::path& base) {
    std::filesystem::path csv = base;
    csv += ".csv";
    std::filesystem::path js = base;
    js += ".json";

    std::ifstream jin(js);
    if (!jin) throw std::runtime_error("cannot read " + js.string());
    json side = json::parse(jin);

    SampledInput input;
    input.kernel.family = family_from_name(side.at("family"));
    input.kernel.sigma_I = side.value("sigma_I", 0.0);
    input.kernel.sigma_min = side.at("sigma_min");
    input.kernel.sigma_max = side.at("sigma_max");
    input.kernel.n_samples = side.at("n_samples");
    input.provenance = provenance_from_name(side.at("provenance"));
    input.N0 = side.value("N0", 0);
    input.tau = side.value("tau", 0.0);
    input.seed = side.value("seed", std::uint64_t{0});
    input.eta = side.value("eta", 1.0);
    input.hbar2_over_2M = side.value("hbar2_over_2M", 20.7212603615);
    input.sum_rule = side.value("sum_rule", 0.25);

    std::ifstream cin(csv);
    if (!cin) throw std::runtime_error("cannot read " + csv.string());
    std::string line;
    std::getline(cin, line);  // header
    while (std::getline(cin, line)) {
        if (line.empty()) continue;
        const auto comma = line.find(',');
        if (comma == std::string::npos)
            throw std::runtime_error("malformed CSV row in " + csv.string());
        input.sigma.push_back(std::stod(line.substr(0, comma)));
        input.phi.push_back(std::stod(line.substr(comma + 1)));
    }
    input.weights.resize(input.phi.size());
    for (std::size_t i = 0; i < input.phi.size(); ++i) {
        if (input.phi[i] == 0.0)
            throw std::runtime_error("zero phi sample in " + csv.string());
        input.weights[i] = 1.0 / (input.phi[i] * input.phi[i]);
    }
    input.validate();
    return input;
}

namespace {

json ansatz_json(const ShapeAnsatz& a) {
    json j;
    j["C"] = a.C;
    j["roots"] = a.roots;
    j["Ebar"] = a.Ebar;
    j["beta"] = a.beta;
    j["gamma_coeffs"] = a.gamma_coeffs;
    j["threshold_exponent"] = a.threshold_exponent;
    j["E_thr"] = a.E_thr;
    j["N"] = a.extrema_count();
    return j;
}

}  // namespace

std::string ansatz_to_json(const ShapeAnsatz& a) { return ansatz_json(a).dump(2); }

ShapeAnsatz ansatz_from_json(const std::string& text) {
    json j = json::parse(text);
    ShapeAnsatz a;
    a.C = j.at("C");
    a.roots = j.at("roots").get<std::vector<double>>();
    a.Ebar = j.at("Ebar");
    a.beta = j.at("beta");
    a.gamma_coeffs = j.value("gamma_coeffs", std::vector<double>{});
    a.threshold_exponent = j.value("threshold_exponent", 0.5);
    a.E_thr = j.value("E_thr", 0.0);
    if (j.contains("N") && j.at("N").get<int>() != a.extrema_count())
        throw std::invalid_argument("ansatz JSON: N does not match roots");
    a.validate(false);
    return a;
}

void write_fit_result(const std::filesystem::path& path, const FitResult& fit) {
    json j;
    j["ansatz"] = ansatz_json(fit.ansatz);
    j["objective"] = fit.objective;
    j["chi_fit"] = fit.chi_fit;
    j["converged"] = fit.converged;
    j["mode"] = fit.grid_only ? "grid-only" : "grid+refine";
    j["residuals"] = fit.residuals;
    json trace = json::array();
    for (const auto& t : fit.scan_trace)
        trace.push_back({t.ebar, t.beta, t.objective});
    j["scan_trace"] = std::move(trace);
    open_out(path) << j.dump(2) << '\n';
}

void write_chi_report(const std::filesystem::path& path, const ChiReport& chi) {
    json j;
    j["chi_input"] = chi.chi_input;
    j["chi_fit"] = chi.chi_fit;
    j["chi_solution"] = chi.chi_solution;
    j["n1"] = chi.n1;
    j["n2"] = chi.n2;
    j["e_range"] = {chi.e_min, chi.e_max};
    open_out(path) << j.dump(2) << '\n';
}

}  // namespace shapeinv::io
