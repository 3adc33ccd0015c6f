#include "support.hpp"

#include "halfinv/job.hpp"

#include <doctest.h>

#include <cstdlib>
#include <fstream>
#include <sstream>

using namespace halfinv;
using nlohmann::json;
namespace fs = std::filesystem;

namespace {

fs::path scratch(const std::string& name) {
    const fs::path dir = fs::temp_directory_path() / ("halfinv-cli-" + name);
    fs::remove_all(dir);
    fs::create_directories(dir);
    return dir;
}

std::string slurp(const fs::path& p) {
    std::ifstream in(p);
    std::stringstream s;
    s << in.rdbuf();
    return s.str();
}

std::vector<std::vector<double>> read_csv(const fs::path& p) {
    std::ifstream in(p);
    std::string line;
    std::getline(in, line);  // header
    std::vector<std::vector<double>> rows;
    while (std::getline(in, line)) {
        std::vector<double> row;
        std::stringstream ss(line);
        std::string cell;
        while (std::getline(ss, cell, ',')) row.push_back(std::stod(cell));
        rows.push_back(row);
    }
    return rows;
}

int run(json j, const fs::path& dir, std::string* errors = nullptr) {
    j["output"] = dir.string();
    std::ostringstream log, err;
    const int code = run_job(j, dir, log, err);
    if (errors) *errors = err.str();
    return code;
}

}  // namespace

TEST_SUITE("cli") {

TEST_CASE("number formatting") {
    CHECK(format_number(0.0) == "0");
    CHECK(format_number(-0.0) == "0");
    CHECK(format_number(1.0) == "1");
    CHECK(format_number(test::pi) == "3.14159265359");
    CHECK(format_number(-2.5e-7) == "-0.00000025");
    CHECK(format_number(123456789012345.0) == "123456789012000");
    CHECK(format_number(0.1 + 0.2) == "0.3");
    CHECK(format_number(9.9999999999996) == "10");
}

TEST_CASE("forward: free spectrum") {
    const fs::path dir = scratch("forward");
    const json j = {{"command", "forward"}, {"sigma", {{"type", "zero"}}}, {"boundary", {{"type", "robin"}, {"h", 0}}},
                    {"count", 5}, {"grid", 1025}};
    REQUIRE(run(j, dir) == kExitOk);
    const auto rows = read_csv(dir / "eigenvalues.csv");
    REQUIRE(rows.size() == 5);
    for (std::size_t n = 0; n < 5; ++n) {
        CHECK(rows[n][0] == static_cast<double>(n));
        CHECK(std::abs(rows[n][1] - test::pi * static_cast<double>(n)) <= 1e-8);
        CHECK(std::abs(rows[n][2] - (n == 0 ? 0.5 : 1.0)) <= 1e-8);
    }
    CHECK(slurp(dir / "eigenvalues.csv").rfind("n,lambda,alpha\n", 0) == 0);
}

TEST_CASE("check: unsolvable gamma family") {
    const fs::path dir = scratch("check");
    const json j = {{"command", "check"}, {"sigma0", {{"type", "gamma"}, {"gamma", 1.5}}}, {"spectrum", {{"harmonic", 10}}}};
    CHECK(run(j, dir) == kExitUnsolvable);
    const json report = json::parse(slurp(dir / "report.json"));
    CHECK(report["alpha"][0].get<double>() == doctest::Approx(-0.25).epsilon(1e-3));
    CHECK_FALSE(report["solvable"].get<bool>());
}

TEST_CASE("roundtrip: gamma family") {
    const fs::path dir = scratch("roundtrip");
    const json j = {{"command", "roundtrip"}, {"sigma0", {{"type", "gamma"}, {"gamma", 0.5}}}, {"spectrum", {{"harmonic", 10}}}};
    REQUIRE(run(j, dir) == kExitOk);
    const json result = json::parse(slurp(dir / "result.json"));
    CHECK(result["diagnostics"]["roundtrip_spectrum_error"].get<double>() <= 1e-4);
    CHECK(result["h"].get<double>() == doctest::Approx(-0.5).epsilon(1e-3));
    const auto rows = read_csv(dir / "roundtrip.csv");
    REQUIRE(rows.size() == 11);
    for (const auto& r : rows) CHECK(std::abs(r[3]) <= 1e-4);
    CHECK(read_csv(dir / "sigma.csv").size() == 257);
}

TEST_CASE("reconstruct: unsolvable still writes the report") {
    const fs::path dir = scratch("reconstruct-unsolvable");
    const json j = {{"command", "reconstruct"}, {"sigma0", {{"type", "gamma"}, {"gamma", 1.2}}}, {"spectrum", {{"harmonic", 6}}}, {"grid", 129}};
    CHECK(run(j, dir) == kExitUnsolvable);
    CHECK(fs::exists(dir / "report.json"));
    CHECK_FALSE(fs::exists(dir / "sigma.csv"));
}

TEST_CASE("phi0 from a sample file") {
    const fs::path dir = scratch("phi0");
    {
        std::ofstream csv(dir / "sigma0.csv");
        csv << "x,sigma\n";
        for (int i = 0; i <= 256; ++i) {
            const double x = 0.5 * i / 256.0;
            csv << format_number(x) << ',' << format_number(2 * 0.5 / (1 - 0.5 * x) - 0.5) << '\n';
        }
    }
    const json j = {{"command", "phi0"}, {"sigma0", {{"type", "samples"}, {"path", "sigma0.csv"}}}, {"grid", 257}};
    REQUIRE(run(j, dir) == kExitOk);
    const auto rows = read_csv(dir / "phi0.csv");
    REQUIRE(rows.size() == 129);
    for (const auto& r : rows) CHECK(std::abs(r[1] + 0.25) <= 1e-3);
}

TEST_CASE("example fixtures") {
    const fs::path dir = scratch("example");
    REQUIRE(run({{"command", "example"}, {"gamma", 0.5}, {"grid", 65}}, dir) == kExitOk);
    const json e = json::parse(slurp(dir / "example.json"));
    CHECK(e["h"].get<double>() == -0.5);
    CHECK(e["alpha0"].get<double>() == 0.25);
    const auto w = read_csv(dir / "eigenfunctions.csv");
    CHECK(w.back()[1] == doctest::Approx(2.0));  // w_0(1) = 1/(1 - gamma)
    CHECK(read_csv(dir / "sigma.csv").back()[1] == doctest::Approx(1.5));

    const fs::path beyond = scratch("example-beyond");
    REQUIRE(run({{"command", "example"}, {"gamma", 1.5}, {"grid", 65}}, beyond) == kExitOk);
    CHECK(json::parse(slurp(beyond / "example.json"))["solvable"] == false);
    CHECK_FALSE(fs::exists(beyond / "eigenfunctions.csv"));
}

TEST_CASE("configuration errors exit with 1") {
    const fs::path dir = scratch("errors");
    const json base = {{"command", "forward"}, {"sigma", {{"type", "zero"}}}};
    CHECK(run(base, dir) == kExitOk);
    for (const json& bad : {json{{"command", "fly"}},
                            json{{"command", "forward"}},
                            json{{"command", "forward"}, {"sigma", {{"type", "zero"}}}, {"grid", 256}},
                            json{{"command", "forward"}, {"sigma", {{"type", "zero"}}}, {"colour", 1}},
                            json{{"command", "forward"}, {"sigma", {{"type", "samples"}, {"path", "missing.csv"}}}},
                            json{{"command", "check"}, {"sigma0", {{"type", "zero"}}}},
                            json{{"command", "check"}, {"sigma0", {{"type", "zero"}}}, {"spectrum", {{"head", {0.0, 5.0, 4.0}}}}},
                            json{{"command", "reconstruct"}, {"sigma0", {{"type", "zero"}}}, {"spectrum", {{"harmonic", 3}}}, {"grid", 131}},
                            json{{"command", "forward"}, {"sigma", {{"type", "gamma"}, {"gamma", "big"}}}}}) {
        std::string err;
        CHECK_MESSAGE(run(bad, dir, &err) == kExitConfig, bad.dump());
        CHECK(err.rfind("config error", 0) == 0);
    }
}

TEST_CASE("numerical failures exit with 3") {
    const fs::path dir = scratch("numerical");
    {
        std::ofstream csv(dir / "q.csv");
        csv << "0,1\n1,1\n";
    }
    const json j = {{"command", "forward"}, {"sigma", {{"type", "antiderivative"}, {"path", "q.csv"}}},
                    {"boundary", {{"type", "robin"}, {"h", 0}}}};
    std::string err;
    CHECK(run(j, dir, &err) == kExitNumerical);
    CHECK(err.find("NegativeEigenvalue") != std::string::npos);
}

TEST_CASE("binary: flags override the config and output is deterministic") {
    const fs::path dir = scratch("binary");
    {
        std::ofstream cfg(dir / "job.json");
        cfg << R"({"command": "check", "sigma0": {"type": "gamma", "gamma": 0.5},
                  "spectrum": {"head": [0, 3.2, 6.3], "tail": {"model": "coulomb", "c": 0.05}},
                  "grid": 99999, "output": "ignored"})";
    }
    const std::string cli = HALFINV_CLI_PATH;
    const std::string base = cli + " --config " + (dir / "job.json").string() + " --grid 129 --truncation 6 --output ";
    REQUIRE(std::system((base + (dir / "a").string() + " > /dev/null").c_str()) == 0);
    REQUIRE(std::system((base + (dir / "b").string() + " > /dev/null").c_str()) == 0);
    const std::string a = slurp(dir / "a" / "report.json");
    CHECK(a == slurp(dir / "b" / "report.json"));
    CHECK(json::parse(a)["alpha"].size() == 6);
    CHECK(WEXITSTATUS(std::system((cli + " --config /nonexistent.json 2> /dev/null").c_str())) == kExitConfig);
    CHECK(WEXITSTATUS(std::system((cli + " --bogus 2> /dev/null").c_str())) == kExitConfig);
}

}
