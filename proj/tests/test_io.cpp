#include "shapeinv/io.hpp"

#include <doctest.h>

#include <filesystem>
#include <fstream>
#include <sstream>

using namespace shapeinv;
namespace fs = std::filesystem;

namespace {

std::string slurp(const fs::path& p) {
    std::ifstream in(p);
    std::stringstream ss;
    ss << in.rdbuf();
    return ss.str();
}

struct TempDir {
    fs::path path;
    TempDir() : path(fs::temp_directory_path() / "shapeinv_io_test") {
        fs::remove_all(path);
        fs::create_directories(path);
    }
    ~TempDir() { fs::remove_all(path); }
};

}  // namespace

TEST_CASE("input files round-trip exactly") {
    TempDir tmp;
    const ModelProblem p;
    auto input = galerkin_input(p, KernelSpec::lorentz(10.0, -2.0, 41.4, 12), 4);
    io::write_input(tmp.path / "in", input);
    const auto back = io::read_input(tmp.path / "in");
    CHECK(back.sigma == input.sigma);
    CHECK(back.phi == input.phi);
    CHECK(back.weights == input.weights);
    CHECK(back.kernel.family == input.kernel.family);
    CHECK(back.kernel.sigma_I == input.kernel.sigma_I);
    CHECK(back.provenance == Provenance::Galerkin);
    CHECK(back.N0 == 4);
    CHECK(back.sum_rule == input.sum_rule);
}

TEST_CASE("writes are byte-for-byte deterministic") {
    TempDir tmp;
    const ModelProblem p;
    auto base = exact_input(p, KernelSpec::laplace(1.9304, 10));
    const auto noisy = noisy_input(base, 0.05, 7);
    io::write_input(tmp.path / "a", noisy);
    io::write_input(tmp.path / "b", noisy_input(base, 0.05, 7));
    CHECK(slurp(tmp.path / "a.csv") == slurp(tmp.path / "b.csv"));
    CHECK(slurp(tmp.path / "a.json") == slurp(tmp.path / "b.json"));
}

TEST_CASE("ansatz JSON round trip") {
    ShapeAnsatz a;
    a.C = -2.28e-3;
    a.roots = {2.96, 11.0};
    a.Ebar = 20.72;
    a.beta = 6.0;
    a.gamma_coeffs = {0.1, -0.2};
    const auto text = io::ansatz_to_json(a);
    const auto b = io::ansatz_from_json(text);
    CHECK(b.C == a.C);
    CHECK(b.roots == a.roots);
    CHECK(b.Ebar == a.Ebar);
    CHECK(b.beta == a.beta);
    CHECK(b.gamma_coeffs == a.gamma_coeffs);
    CHECK(b.threshold_exponent == a.threshold_exponent);

    CHECK_THROWS(io::ansatz_from_json("{\"C\": 1.0}"));
}

TEST_CASE("missing input is reported with the path") {
    CHECK_THROWS_WITH_AS(io::read_input("/nonexistent/base"),
                         doctest::Contains("/nonexistent/base"),
                         std::runtime_error);
}

TEST_CASE("curve CSV carries a header and full-precision values") {
    TempDir tmp;
    io::write_curve_csv(tmp.path / "c.csv", "sigma", "value",
                        {0.1, 0.2}, {1.0 / 3.0, 2.0 / 3.0});
    const auto text = slurp(tmp.path / "c.csv");
    CHECK(text.find("sigma,value") == 0);
    CHECK(text.find("3.33333333333333315e-01") != std::string::npos);
}
