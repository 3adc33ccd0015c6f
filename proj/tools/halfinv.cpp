// Batch driver: halfinv --config job.json [--output dir] [--grid n] [--truncation m]

#include "halfinv/job.hpp"

#include <CLI11.hpp>

#include <fstream>
#include <iostream>

int main(int argc, char** argv) {
    CLI::App app{"Half-inverse Sturm-Liouville solver"};
    std::string config_path;
    std::string output;
    long long grid = -1;
    long long truncation = -1;
    app.add_option("--config", config_path, "JSON job description")->required();
    app.add_option("--output", output, "output directory (overrides the config)");
    app.add_option("--grid", grid, "odd node count on [0, 1] (overrides the config)");
    app.add_option("--truncation", truncation, "series truncation M (overrides the config)");
    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        const int code = app.exit(e);
        return code == 0 ? 0 : halfinv::kExitConfig;
    }

    std::ifstream in(config_path);
    if (!in) {
        std::cerr << "config error: cannot read " << config_path << '\n';
        return halfinv::kExitConfig;
    }
    nlohmann::json job;
    try {
        in >> job;
    } catch (const nlohmann::json::exception& e) {
        std::cerr << "config error: " << e.what() << '\n';
        return halfinv::kExitConfig;
    }
    if (!job.is_object()) {
        std::cerr << "config error: the job must be a JSON object\n";
        return halfinv::kExitConfig;
    }
    if (!output.empty()) job["output"] = output;
    if (grid >= 0) job["grid"] = grid;
    if (truncation >= 0) job["truncation"] = truncation;

    const auto base = std::filesystem::path(config_path).parent_path();
    return halfinv::run_job(job, base, std::cout, std::cerr);
}
