#include <cstdint>
#include <filesystem>
#include <iostream>
#include <string>

#include <CLI11.hpp>

#include "psit/config.hpp"
#include "psit/report.hpp"

int main(int argc, char** argv) {
    CLI::App app{"Discrete-path engine for processes on predictable interval sets"};
    std::string config_path;
    std::string out_override;
    std::string filter;
    std::uint64_t seed = 0;
    int paths = 0;

    app.add_option("--config", config_path, "scenario configuration (JSON)")->required();
    app.add_option("--seed", seed, "override rng.seed");
    app.add_option("--paths", paths, "override rng.n_paths");
    app.add_option("--out", out_override, "override run.outputs directory");
    app.add_option("--filter", filter, "verify mode: only run checks whose name contains this");

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        const int code = app.exit(e);
        return code == 0 ? 0 : 2;  // usage problems count as configuration errors
    }

    try {
        psit::ScenarioConfig cfg = psit::load_config(config_path);
        if (app.count("--seed")) cfg.market.rng.master_seed = seed;
        if (app.count("--paths")) {
            if (paths < 1) throw psit::ConfigError("--paths: must be >= 1");
            cfg.market.n_paths = paths;
        }
        const std::string out = out_override.empty() ? cfg.run.outputs : out_override;

        switch (cfg.run.mode) {
            case psit::RunMode::verify: {
                psit::RunReport report = psit::run_verify(cfg, filter);
                if (report.checks.empty())
                    throw psit::ConfigError("--filter '" + filter + "' matched no checks");
                psit::write_verify_text(report, std::cout);
                std::filesystem::create_directories(out);
                psit::write_verify_json(report, out + "/verify_report.json");
                return report.all_passed() ? 0 : 1;
            }
            case psit::RunMode::simulate:
                psit::run_simulate(cfg, out);
                return 0;
            case psit::RunMode::finance:
                psit::run_finance(cfg, out);
                return 0;
        }
    } catch (const psit::ConfigError& e) {
        std::cerr << "config error: " << e.what() << "\n";
        return 2;
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 3;
    }
    return 0;
}
